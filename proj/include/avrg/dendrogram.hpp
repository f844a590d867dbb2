#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg {

/// Plain recursive tree value used to hand clusterings to Dendrogram.
struct ClusterTree {
  std::optional<NodeId> leaf;
  std::vector<ClusterTree> children;

  static ClusterTree make_leaf(NodeId id) { return ClusterTree{id, {}}; }
  static ClusterTree join(std::vector<ClusterTree> children) {
    return ClusterTree{std::nullopt, std::move(children)};
  }
};

/// Rooted tree whose leaves are graph nodes.
///
/// Internal nodes are labelled 1, 2, ... in preorder when the tree is built
/// and keep their labels for life. The extractor shrinks the tree by
/// replacing whole subtrees with single leaves.
class Dendrogram {
public:
  using Index = std::size_t;
  static constexpr Index npos = std::numeric_limits<Index>::max();

  /// Unary chains are collapsed. Throws ValidationError on an empty tree or
  /// a repeated leaf.
  explicit Dendrogram(const ClusterTree &tree);

  Index root() const { return root_; }
  bool is_leaf(Index i) const { return nodes_[i].leaf.has_value(); }
  NodeId leaf_node(Index i) const { return *nodes_[i].leaf; }
  const std::vector<Index> &children(Index i) const { return nodes_[i].children; }
  Index parent(Index i) const { return nodes_[i].parent; }
  std::size_t leaf_count(Index i) const { return nodes_[i].leaf_count; }
  /// Preorder label of an internal node (the 3 in "eta_3").
  std::uint32_t label(Index i) const { return nodes_[i].label; }
  std::optional<Index> find_internal(std::uint32_t label) const;
  std::optional<Index> find_leaf(NodeId id) const;

  /// Live internal nodes ordered by label.
  std::vector<Index> internal_nodes() const;
  std::size_t internal_count() const;
  /// Leaves under i, ascending by node id.
  std::vector<NodeId> leaves(Index i) const;
  std::size_t leaf_total() const { return leaf_of_.size(); }
  std::size_t depth(Index i) const;

  /// Replaces the subtree at i with a single leaf holding replacement.
  void contract(Index i, NodeId replacement);

  ClusterTree to_cluster_tree() const;

  bool operator==(const Dendrogram &other) const;

private:
  struct TreeNode {
    Index parent = npos;
    std::vector<Index> children;
    std::optional<NodeId> leaf;
    std::uint32_t label = 0;
    std::size_t leaf_count = 0;
    bool alive = true;
  };

  Index add(const ClusterTree &tree, Index parent);
  ClusterTree export_subtree(Index i) const;

  std::vector<TreeNode> nodes_;
  std::unordered_map<NodeId, Index> leaf_of_;
  Index root_ = npos;
};

/// Normalized Dasgupta cost: sum over edges (multiplicity-weighted) of the
/// leaf count under the edge's lowest common ancestor, over |V| * |E|.
double ndc(const Dendrogram &d, const AttributedGraph &g);

/// Throws ValidationError listing nodes that are missing from, or foreign
/// to, the dendrogram's leaf set.
void check_leaf_cover(const Dendrogram &d, const AttributedGraph &g);

/// Nested parenthesized list over node names, e.g. "((e,(c,d)),(a,b))".
Dendrogram parse_dendrogram(const std::string &text, const AttributedGraph &g);
Dendrogram load_dendrogram(std::istream &in, const AttributedGraph &g);
std::string format_dendrogram(const Dendrogram &d, const AttributedGraph &g);

} // namespace avrg
