#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg {

/// A node as the extractor saw it: an input node (by name), or the
/// nonterminal created by an earlier step (by step index).
using NodeRef = std::variant<std::string, std::size_t>;

struct CutEdge {
  NodeId position; // RHS node of the stored rule
  NodeRef external;

  bool operator==(const CutEdge &) const = default;
};

/// One extract-and-contract step.
struct DerivationStep {
  std::uint32_t tree_node = 0; // dendrogram label of the selected node
  std::size_t rule = 0;        // index into the grammar
  std::vector<NodeRef> mapping; // stored-rule RHS position -> node
  std::vector<CutEdge> cut;     // sorted by (external, position)

  bool operator==(const DerivationStep &) const = default;
};

/// Ordered extraction record; replaying it backwards rebuilds the input.
struct DerivationLog {
  std::vector<DerivationStep> steps;

  bool operator==(const DerivationLog &) const = default;
};

} // namespace avrg
