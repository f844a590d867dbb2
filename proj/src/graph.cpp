#include "avrg/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "avrg/error.hpp"

namespace avrg {

AttributedGraph::AttributedGraph(std::vector<std::string> alphabet)
    : alphabet_(std::move(alphabet)) {}

std::optional<std::uint32_t> AttributedGraph::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i] == label)
      return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

NodeId AttributedGraph::add_node(NodeData data) {
  const NodeId id = next_id_;
  insert_node(id, std::move(data));
  return id;
}

void AttributedGraph::insert_node(NodeId id, NodeData data) {
  if (data.is_terminal() && data.attr >= alphabet_.size())
    throw ValidationError("terminal attribute index " + std::to_string(data.attr) +
                          " outside alphabet of size " + std::to_string(alphabet_.size()));
  auto [it, inserted] = nodes_.emplace(id, std::move(data));
  if (!inserted)
    throw InternalError("node id " + std::to_string(id) + " already in use");
  adjacency_.emplace(id, Adjacency{});
  next_id_ = std::max(next_id_, id + 1);
}

void AttributedGraph::remove_node(NodeId id) {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end())
    throw InternalError("remove_node: unknown node " + std::to_string(id));
  for (const auto &[v, k] : it->second.neighbors) {
    auto &other = adjacency_.at(v);
    other.neighbors.erase(id);
    other.degree -= k;
    edge_count_ -= k;
    --pair_count_;
  }
  adjacency_.erase(it);
  nodes_.erase(id);
}

const NodeData &AttributedGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw ValidationError("unknown node " + std::to_string(id));
  return it->second;
}

void AttributedGraph::set_boundary(NodeId id, std::optional<std::uint32_t> boundary) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw ValidationError("unknown node " + std::to_string(id));
  it->second.boundary = boundary;
}

std::vector<NodeId> AttributedGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto &[id, _] : nodes_)
    ids.push_back(id);
  return ids;
}

void AttributedGraph::add_edge(NodeId u, NodeId v, std::uint32_t multiplicity) {
  if (u == v)
    throw ValidationError("self-loop on node " + display_name(u));
  if (multiplicity == 0)
    return;
  auto iu = adjacency_.find(u);
  auto iv = adjacency_.find(v);
  if (iu == adjacency_.end() || iv == adjacency_.end())
    throw ValidationError("edge references unknown node");
  auto [slot, fresh] = iu->second.neighbors.try_emplace(v, 0);
  slot->second += multiplicity;
  iv->second.neighbors[u] += multiplicity;
  iu->second.degree += multiplicity;
  iv->second.degree += multiplicity;
  edge_count_ += multiplicity;
  if (fresh)
    ++pair_count_;
}

void AttributedGraph::remove_edge(NodeId u, NodeId v) {
  auto iu = adjacency_.find(u);
  if (iu == adjacency_.end())
    return;
  auto e = iu->second.neighbors.find(v);
  if (e == iu->second.neighbors.end())
    return;
  const std::uint32_t k = e->second;
  iu->second.neighbors.erase(e);
  iu->second.degree -= k;
  auto &other = adjacency_.at(v);
  other.neighbors.erase(u);
  other.degree -= k;
  edge_count_ -= k;
  --pair_count_;
}

std::uint32_t AttributedGraph::multiplicity(NodeId u, NodeId v) const {
  auto iu = adjacency_.find(u);
  if (iu == adjacency_.end())
    return 0;
  auto e = iu->second.neighbors.find(v);
  return e == iu->second.neighbors.end() ? 0 : e->second;
}

const AttributedGraph::Neighbors &AttributedGraph::neighbors(NodeId u) const {
  auto it = adjacency_.find(u);
  if (it == adjacency_.end())
    throw ValidationError("unknown node " + std::to_string(u));
  return it->second.neighbors;
}

std::uint64_t AttributedGraph::degree(NodeId u) const {
  auto it = adjacency_.find(u);
  if (it == adjacency_.end())
    throw ValidationError("unknown node " + std::to_string(u));
  return it->second.degree;
}

std::vector<Edge> AttributedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(pair_count_);
  for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) { out.push_back({u, v, k}); });
  return out;
}

std::string AttributedGraph::display_name(NodeId id) const {
  auto it = nodes_.find(id);
  if (it != nodes_.end() && !it->second.name.empty())
    return it->second.name;
  return "_" + std::to_string(id);
}

std::unordered_map<std::string, NodeId> AttributedGraph::name_index() const {
  std::unordered_map<std::string, NodeId> index;
  index.reserve(nodes_.size());
  for (const auto &[id, _] : nodes_)
    index.emplace(display_name(id), id);
  return index;
}

bool AttributedGraph::operator==(const AttributedGraph &other) const {
  if (alphabet_ != other.alphabet_ || nodes_ != other.nodes_ || edge_count_ != other.edge_count_)
    return false;
  for (const auto &[u, adj] : adjacency_)
    if (adj.neighbors != other.adjacency_.at(u).neighbors)
      return false;
  return true;
}

AttributedGraph induced_subgraph(const AttributedGraph &g, std::span<const NodeId> node_set) {
  AttributedGraph sub(g.alphabet());
  std::set<NodeId> members;
  for (NodeId id : node_set) {
    if (!g.has_node(id))
      throw ValidationError("induced_subgraph: unknown node " + std::to_string(id));
    if (members.insert(id).second)
      sub.insert_node(id, g.node(id));
  }
  for (NodeId u : members)
    for (const auto &[v, k] : g.neighbors(u))
      if (u < v && members.contains(v))
        sub.add_edge(u, v, k);
  return sub;
}

AttributedGraph terminal_subgraph(const AttributedGraph &g) {
  std::vector<NodeId> terminals;
  for (const auto &[id, data] : g.nodes())
    if (data.is_terminal())
      terminals.push_back(id);
  return induced_subgraph(g, terminals);
}

BoundaryCut boundary_edges(const AttributedGraph &g, std::span<const NodeId> node_set) {
  std::set<NodeId> members(node_set.begin(), node_set.end());
  BoundaryCut cut;
  for (NodeId u : members) {
    if (!g.has_node(u))
      throw ValidationError("boundary_edges: unknown node " + std::to_string(u));
    std::uint32_t b = 0;
    for (const auto &[v, k] : g.neighbors(u)) {
      if (members.contains(v))
        continue;
      for (std::uint32_t i = 0; i < k; ++i)
        cut.cut_edges.emplace_back(u, v);
      b += k;
    }
    cut.boundary_degree[u] = b;
  }
  return cut;
}

std::vector<std::vector<NodeId>> connected_components(const AttributedGraph &g) {
  std::set<NodeId> seen;
  std::vector<std::vector<NodeId>> components;
  for (const auto &[start, _] : g.nodes()) {
    if (seen.contains(start))
      continue;
    std::vector<NodeId> comp;
    std::deque<NodeId> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (const auto &[v, _k] : g.neighbors(u))
        if (seen.insert(v).second)
          queue.push_back(v);
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

} // namespace avrg
