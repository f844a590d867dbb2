#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace avrg {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Terminal, Nonterminal };

/// One node of an attributed multigraph.
///
/// Terminals carry an attribute (an index into the owning graph's alphabet);
/// nonterminals carry their size. The boundary degree is only meaningful on
/// the right-hand side of a grammar rule.
struct NodeData {
  NodeKind kind = NodeKind::Terminal;
  std::uint32_t attr = 0;
  std::uint32_t size = 0;
  std::optional<std::uint32_t> boundary;
  std::string name;

  static NodeData terminal(std::uint32_t attr, std::string name = {}) {
    NodeData d;
    d.kind = NodeKind::Terminal;
    d.attr = attr;
    d.name = std::move(name);
    return d;
  }

  static NodeData nonterminal(std::uint32_t size, std::string name = {}) {
    NodeData d;
    d.kind = NodeKind::Nonterminal;
    d.size = size;
    d.name = std::move(name);
    return d;
  }

  bool is_terminal() const { return kind == NodeKind::Terminal; }

  bool operator==(const NodeData &) const = default;
};

struct Edge {
  NodeId u;
  NodeId v;
  std::uint32_t multiplicity;

  bool operator==(const Edge &) const = default;
};

/// Undirected multigraph with discrete node attributes.
///
/// Edges are keyed by unordered node pairs with a positive multiplicity;
/// self-loops are rejected. Node identifiers are stable for the lifetime of
/// the graph and never reused.
class AttributedGraph {
public:
  using Neighbors = std::map<NodeId, std::uint32_t>;

  AttributedGraph() = default;
  explicit AttributedGraph(std::vector<std::string> alphabet);

  const std::vector<std::string> &alphabet() const { return alphabet_; }
  std::optional<std::uint32_t> find_label(std::string_view label) const;
  const std::string &label(std::uint32_t attr) const { return alphabet_.at(attr); }

  NodeId add_node(NodeData data);
  /// Inserts with a caller-chosen identifier; throws if it is taken.
  void insert_node(NodeId id, NodeData data);
  void remove_node(NodeId id);
  bool has_node(NodeId id) const { return nodes_.contains(id); }
  const NodeData &node(NodeId id) const;
  void set_boundary(NodeId id, std::optional<std::uint32_t> boundary);
  std::size_t node_count() const { return nodes_.size(); }
  const std::map<NodeId, NodeData> &nodes() const { return nodes_; }
  std::vector<NodeId> node_ids() const;
  NodeId next_id() const { return next_id_; }

  void add_edge(NodeId u, NodeId v, std::uint32_t multiplicity = 1);
  /// Removes the pair entirely, whatever its multiplicity.
  void remove_edge(NodeId u, NodeId v);
  std::uint32_t multiplicity(NodeId u, NodeId v) const;
  const Neighbors &neighbors(NodeId u) const;
  /// Degree counting multiplicities.
  std::uint64_t degree(NodeId u) const;
  /// Total edge count, multiplicities included.
  std::uint64_t edge_count() const { return edge_count_; }
  std::size_t edge_pair_count() const { return pair_count_; }
  /// Every edge once, with u < v, in ascending order.
  std::vector<Edge> edges() const;

  template <typename F> void for_each_edge(F &&fn) const {
    for (const auto &[u, adj] : adjacency_)
      for (const auto &[v, k] : adj.neighbors)
        if (u < v)
          fn(u, v, k);
  }

  /// Node name, or "_<id>" for anonymous nodes.
  std::string display_name(NodeId id) const;
  std::unordered_map<std::string, NodeId> name_index() const;

  bool operator==(const AttributedGraph &other) const;

private:
  struct Adjacency {
    Neighbors neighbors;
    std::uint64_t degree = 0;
  };

  std::vector<std::string> alphabet_;
  std::map<NodeId, NodeData> nodes_;
  std::map<NodeId, Adjacency> adjacency_;
  NodeId next_id_ = 0;
  std::uint64_t edge_count_ = 0;
  std::size_t pair_count_ = 0;
};

/// Subgraph on node_set with every edge whose endpoints both lie inside.
/// Node identifiers and data are preserved.
AttributedGraph induced_subgraph(const AttributedGraph &g, std::span<const NodeId> node_set);

/// Graph restricted to its terminal nodes.
AttributedGraph terminal_subgraph(const AttributedGraph &g);

struct BoundaryCut {
  /// (inside, outside) endpoint pairs, one entry per unit of multiplicity.
  std::vector<std::pair<NodeId, NodeId>> cut_edges;
  std::map<NodeId, std::uint32_t> boundary_degree;
};

/// Edges with exactly one endpoint in node_set.
BoundaryCut boundary_edges(const AttributedGraph &g, std::span<const NodeId> node_set);

/// Connected components as sorted node lists, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const AttributedGraph &g);

} // namespace avrg
