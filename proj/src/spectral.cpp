#include "avrg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

#include "avrg/random.hpp"

namespace avrg::spectral {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += alpha * x[i];
}

} // namespace

std::vector<EigenPair> lanczos_largest(const MatVec &op, std::size_t n, std::size_t count,
                                       std::size_t krylov_dim,
                                       std::span<const std::vector<double>> deflate,
                                       std::uint64_t seed, bool want_vectors) {
  const std::size_t free_dim = n > deflate.size() ? n - deflate.size() : 0;
  krylov_dim = std::min(krylov_dim, free_dim);
  if (krylov_dim == 0 || count == 0)
    return {};

  Rng rng(seed);
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> q(n);
  for (auto &x : q)
    x = rng.uniform01() - 0.5;

  auto orthogonalize = [&](std::vector<double> &w) {
    // Two passes of classical Gram-Schmidt are enough in double precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto &d : deflate)
        axpy(-dot(d, w), d, w);
      for (const auto &b : basis)
        axpy(-dot(b, w), b, w);
    }
  };

  orthogonalize(q);
  double norm = std::sqrt(dot(q, q));
  if (norm == 0.0)
    return {};
  for (auto &x : q)
    x /= norm;

  // Extends the Krylov space until the top Ritz values have converged or the
  // space is exhausted; full reorthogonalization keeps the basis clean.
  auto solve = [&] {
    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) {
        t(i, i + 1) = beta[static_cast<std::size_t>(i)];
        t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t);
  };
  auto converged = [&](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> &s, double residual) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    if (static_cast<std::size_t>(m) < count)
      return false;
    for (std::size_t r = 0; r < count; ++r) {
      const auto col = m - 1 - static_cast<Eigen::Index>(r);
      if (residual * std::abs(s.eigenvectors()(m - 1, col)) > 1e-11 * std::max(1.0, std::abs(s.eigenvalues()(col))))
        return false;
    }
    return true;
  };

  std::vector<double> w(n);
  while (basis.size() < krylov_dim) {
    basis.push_back(q);
    op(basis.back(), w);
    const double a = dot(basis.back(), w);
    alpha.push_back(a);
    orthogonalize(w);
    const double b = std::sqrt(dot(w, w));
    if (b < 1e-12 || basis.size() == krylov_dim)
      break;
    if (basis.size() >= count && basis.size() % 10 == 0 && converged(solve(), b))
      break;
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i)
      q[i] = w[i] / b;
  }

  const std::size_t m = basis.size();
  const auto solver = solve();
  const auto &values = solver.eigenvalues();
  const auto &vectors = solver.eigenvectors();

  std::vector<EigenPair> out;
  for (std::size_t r = 0; r < std::min(count, m); ++r) {
    const auto col = static_cast<Eigen::Index>(m - 1 - r);
    EigenPair pair;
    pair.value = values(col);
    if (want_vectors) {
      pair.vector.assign(n, 0.0);
      for (std::size_t k = 0; k < m; ++k)
        axpy(vectors(static_cast<Eigen::Index>(k), col), basis[k], pair.vector);
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<double> laplacian_spectrum(const AttributedGraph &g, std::size_t dense_limit,
                                       std::size_t top_k) {
  const auto ids = g.node_ids();
  const std::size_t n = ids.size();
  if (n == 0)
    return {};
  std::unordered_map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i)
    index.emplace(ids[i], i);

  std::vector<double> values;
  if (n <= dense_limit) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
      const auto i = static_cast<Eigen::Index>(index[u]);
      const auto j = static_cast<Eigen::Index>(index[v]);
      lap(i, j) -= k;
      lap(j, i) -= k;
      lap(i, i) += k;
      lap(j, j) += k;
    });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
    const auto &ev = solver.eigenvalues();
    values.assign(ev.data(), ev.data() + ev.size());
  } else {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    std::vector<double> deg(n, 0.0);
    g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
      adj[index[u]].emplace_back(index[v], k);
      adj[index[v]].emplace_back(index[u], k);
      deg[index[u]] += k;
      deg[index[v]] += k;
    });
    MatVec op = [&](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = deg[i] * x[i];
        for (auto [j, w] : adj[i])
          s -= w * x[j];
        y[i] = s;
      }
    };
    for (const auto &p : lanczos_largest(op, n, top_k, std::min(n, std::max<std::size_t>(4 * top_k, 300)), {}, 0x5eed, false))
      values.push_back(p.value);
  }
  for (auto &v : values)
    if (std::abs(v) < 1e-12)
      v = 0.0;
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

} // namespace avrg::spectral
