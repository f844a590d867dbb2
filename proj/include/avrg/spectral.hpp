#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg::spectral {

/// y = A x for a symmetric operator A.
using MatVec = std::function<void(std::span<const double> x, std::span<double> y)>;

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Lanczos with full reorthogonalization. Returns the `count` largest Ritz
/// pairs (descending) of the operator restricted to the orthogonal
/// complement of `deflate` (each deflation vector must be unit length).
/// `krylov_dim` caps the basis; iteration stops early once the wanted Ritz
/// values have converged.
std::vector<EigenPair> lanczos_largest(const MatVec &op, std::size_t n, std::size_t count,
                                       std::size_t krylov_dim,
                                       std::span<const std::vector<double>> deflate,
                                       std::uint64_t seed, bool want_vectors);

/// Eigenvalues of the multiplicity-weighted combinatorial Laplacian D - A,
/// sorted descending. Dense solve up to dense_limit nodes; above that only
/// the top_k largest values are returned (callers pad with zeros).
std::vector<double> laplacian_spectrum(const AttributedGraph &g, std::size_t dense_limit = 2000,
                                       std::size_t top_k = 200);

} // namespace avrg::spectral
