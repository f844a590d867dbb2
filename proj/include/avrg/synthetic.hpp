#pragma once

#include <cstdint>

#include "avrg/dendrogram.hpp"
#include "avrg/graph.hpp"

namespace avrg {

struct Fixture {
  AttributedGraph graph;
  Dendrogram dendrogram;
};

/// Nine-node running example: a-e blue, f-i pink, 16 edges, two color
/// clusters bridged by c-h and b-f, with the tree
/// (((e,(c,d)),(a,b)),((f,g),(h,i))).
Fixture two_community_fixture();

struct CabamConfig {
  std::size_t n = 500;
  std::size_t m = 2;
  std::uint32_t num_classes = 2;
  /// Weight on same-class targets; cross-class targets get 1 - p_c.
  double p_c = 0.5;
  std::uint64_t seed = 0;
};

/// Throws ValidationError unless n > m >= 1, num_classes >= 2, p_c in [0, 1].
void validate_cabam(const CabamConfig &config);

/// Class-aware preferential attachment. Starts from an m-clique labelled
/// round-robin; each arriving node draws a uniform class and attaches to m
/// distinct earlier nodes with weight (degree + 1) * (p_c or 1 - p_c). When
/// fewer than m candidates have positive weight, the rest are drawn by
/// (degree + 1) alone. Classes are labelled "c0", "c1", ...
AttributedGraph cabam_generate(const CabamConfig &config);

} // namespace avrg
