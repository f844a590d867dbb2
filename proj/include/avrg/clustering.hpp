#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avrg/dendrogram.hpp"
#include "avrg/graph.hpp"
#include "avrg/random.hpp"

namespace avrg {

enum class ClusteringMethod { Louvain, ConductanceBisection, LabelPropagation };

std::optional<ClusteringMethod> parse_clustering_method(std::string_view name);
std::string_view to_string(ClusteringMethod method);

/// Recursive hierarchical clustering over the graph's topology.
///
/// Disconnected vertex sets are first split into their components (the
/// top-level split of a disconnected graph warns on stderr). Sets of two
/// nodes become a pair; larger sets are split by the chosen method and
/// recursed into. Pure function of (graph, method, seed).
Dendrogram build_dendrogram(const AttributedGraph &g, ClusteringMethod method,
                            std::uint64_t seed);

/// Caterpillar over a seeded random permutation; a worst-case baseline.
Dendrogram random_caterpillar(const AttributedGraph &g, std::uint64_t seed);

/// Multilevel Louvain (resolution 1) on the subgraph induced by `nodes`.
/// Returns one community assignment per level, finest first, each aligned
/// with `nodes`. Levels that merge nothing are omitted.
std::vector<std::vector<std::uint32_t>> louvain_levels(const AttributedGraph &g,
                                                       std::span<const NodeId> nodes, Rng &rng);

/// Two-way split of a connected node set by a sweep cut over the Fiedler
/// vector of the normalized Laplacian, minimizing conductance. Ties go to
/// the more balanced cut.
std::pair<std::vector<NodeId>, std::vector<NodeId>>
conductance_bisection(const AttributedGraph &g, std::span<const NodeId> nodes);

/// Conductance cut(S) / min(vol S, vol rest) within the subgraph induced by
/// `nodes`.
double conductance(const AttributedGraph &g, std::span<const NodeId> nodes,
                   std::span<const NodeId> side);

/// Asynchronous label propagation with seeded order and tie-breaking.
std::vector<std::uint32_t> label_propagation(const AttributedGraph &g,
                                             std::span<const NodeId> nodes, Rng &rng);

} // namespace avrg
