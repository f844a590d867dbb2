#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "avrg/dendrogram.hpp"
#include "avrg/derivation.hpp"
#include "avrg/grammar.hpp"
#include "avrg/graph.hpp"
#include "avrg/random.hpp"

namespace avrg {

struct TreeNodeScore {
  Dendrogram::Index index;
  std::uint32_t label;
  double score;
};

/// Scores every live internal node by | leaf count - mu |, ordered by label.
std::vector<TreeNodeScore> score_tree_nodes(const Dendrogram &d, std::uint32_t mu);

/// Uniform draw from the lowest-scoring nodes. Returns the winner's index.
Dendrogram::Index select_tree_node(std::span<const TreeNodeScore> scores, Rng &rng);

struct ExtractedRule {
  Rule rule;
  std::vector<NodeId> members; // RHS position -> graph node
  /// (inside, outside) graph nodes, one entry per unit of multiplicity,
  /// sorted.
  std::vector<std::pair<NodeId, NodeId>> cut;
};

/// Cuts the rule rooted at tree node `at` out of the current graph. The
/// RHS is the induced subgraph on the subtree's leaves with boundary
/// degrees attached; frequency is 1.
ExtractedRule extract_rule(const AttributedGraph &g, const Dendrogram &d, Dendrogram::Index at);

/// Replaces the extracted nodes by one nonterminal (in both the graph and
/// the dendrogram) and redirects the cut edges to it. Returns its id.
NodeId contract(AttributedGraph &g, Dendrogram &d, Dendrogram::Index at,
                const ExtractedRule &extracted);

struct ExtractionOptions {
  std::uint32_t mu = 5;
  std::uint64_t seed = 0;
};

struct ExtractionResult {
  Grammar grammar;
  DerivationLog log;
};

/// Select / extract / merge / contract until the dendrogram is a single
/// size-0 nonterminal. The grammar comes back in canonical rule order.
ExtractionResult extract_grammar(const AttributedGraph &g, const Dendrogram &d,
                                 ExtractionOptions options);

/// Same loop with the tree nodes picked in the given label order instead of
/// by score. Throws ValidationError if a label is not live when its turn
/// comes or the order ends early.
ExtractionResult extract_grammar_in_order(const AttributedGraph &g, const Dendrogram &d,
                                          std::span<const std::uint32_t> labels);

} // namespace avrg
