#include "avrg/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "avrg/error.hpp"

namespace avrg {

std::vector<TreeNodeScore> score_tree_nodes(const Dendrogram &d, std::uint32_t mu) {
  std::vector<TreeNodeScore> scores;
  for (auto i : d.internal_nodes()) {
    const double size = static_cast<double>(d.leaf_count(i));
    scores.push_back({i, d.label(i), std::abs(size - static_cast<double>(mu))});
  }
  return scores;
}

Dendrogram::Index select_tree_node(std::span<const TreeNodeScore> scores, Rng &rng) {
  if (scores.empty())
    throw InternalError("select_tree_node: no candidates");
  double best = scores.front().score;
  for (const auto &s : scores)
    best = std::min(best, s.score);
  std::vector<Dendrogram::Index> argmin;
  for (const auto &s : scores)
    if (s.score == best)
      argmin.push_back(s.index);
  return argmin[rng.uniform_index(argmin.size())];
}

ExtractedRule extract_rule(const AttributedGraph &g, const Dendrogram &d, Dendrogram::Index at) {
  ExtractedRule out;
  out.members = d.leaves(at);
  const auto boundary = boundary_edges(g, out.members);

  AttributedGraph rhs(g.alphabet());
  std::unordered_map<NodeId, NodeId> position;
  for (NodeId id : out.members) {
    NodeData data = g.node(id);
    data.name.clear();
    data.boundary = boundary.boundary_degree.at(id);
    position.emplace(id, rhs.add_node(std::move(data)));
  }
  for (NodeId u : out.members)
    for (const auto &[v, k] : g.neighbors(u)) {
      auto pv = position.find(v);
      if (u < v && pv != position.end())
        rhs.add_edge(position.at(u), pv->second, k);
    }

  out.cut = boundary.cut_edges;
  std::sort(out.cut.begin(), out.cut.end());
  out.rule.lhs = static_cast<std::uint32_t>(out.cut.size());
  out.rule.rhs = std::move(rhs);
  out.rule.frequency = 1;
  return out;
}

NodeId contract(AttributedGraph &g, Dendrogram &d, Dendrogram::Index at,
                const ExtractedRule &extracted) {
  std::map<NodeId, std::uint32_t> redirected;
  for (const auto &[_, outside] : extracted.cut)
    ++redirected[outside];
  for (NodeId id : extracted.members)
    g.remove_node(id);
  const NodeId x = g.add_node(NodeData::nonterminal(extracted.rule.lhs));
  for (const auto &[v, k] : redirected)
    g.add_edge(x, v, k);
  d.contract(at, x);
  return x;
}

namespace {

using Selector = std::function<Dendrogram::Index(const Dendrogram &)>;

ExtractionResult run_extraction(const AttributedGraph &input, const Dendrogram &tree,
                                const Selector &select) {
  check_leaf_cover(tree, input);
  AttributedGraph g = input;
  Dendrogram d = tree;
  ExtractionResult result{Grammar(input.alphabet()), {}};

  std::unordered_map<NodeId, NodeRef> refs;
  for (const auto &[id, _] : g.nodes())
    refs.emplace(id, g.display_name(id));

  auto finished = [&] {
    if (!d.is_leaf(d.root()))
      return false;
    return std::holds_alternative<std::size_t>(refs.at(d.leaf_node(d.root())));
  };

  while (!finished()) {
    // A single-node input has no internal tree nodes: extract the root leaf.
    const Dendrogram::Index at = d.is_leaf(d.root()) ? d.root() : select(d);
    auto extracted = extract_rule(g, d, at);
    const std::uint32_t label = d.is_leaf(at) ? 0 : d.label(at);

    DerivationStep step;
    step.tree_node = label;
    auto upserted = result.grammar.upsert(extracted.rule);
    step.rule = upserted.index;
    step.mapping.resize(extracted.members.size());
    for (const auto &[candidate_pos, stored_pos] : upserted.position_map)
      step.mapping.at(stored_pos) = refs.at(extracted.members.at(candidate_pos));
    std::unordered_map<NodeId, NodeId> to_stored;
    for (const auto &[candidate_pos, stored_pos] : upserted.position_map)
      to_stored.emplace(extracted.members.at(candidate_pos), stored_pos);
    for (const auto &[inside, outside] : extracted.cut)
      step.cut.push_back({to_stored.at(inside), refs.at(outside)});
    std::sort(step.cut.begin(), step.cut.end(), [](const CutEdge &a, const CutEdge &b) {
      if (a.external != b.external)
        return a.external < b.external;
      return a.position < b.position;
    });

    const NodeId x = contract(g, d, at, extracted);
    for (NodeId id : extracted.members)
      refs.erase(id);
    refs.emplace(x, result.log.steps.size());
    result.log.steps.push_back(std::move(step));
  }

  const auto remap = result.grammar.canonicalize();
  for (auto &step : result.log.steps)
    step.rule = remap[step.rule];
  return result;
}

} // namespace

ExtractionResult extract_grammar(const AttributedGraph &g, const Dendrogram &d,
                                 ExtractionOptions options) {
  if (options.mu < 1)
    throw ValidationError("mu must be at least 1");
  Rng rng(options.seed);
  return run_extraction(g, d, [&](const Dendrogram &tree) {
    const auto scores = score_tree_nodes(tree, options.mu);
    return select_tree_node(scores, rng);
  });
}

ExtractionResult extract_grammar_in_order(const AttributedGraph &g, const Dendrogram &d,
                                          std::span<const std::uint32_t> labels) {
  std::size_t next = 0;
  return run_extraction(g, d, [&](const Dendrogram &tree) {
    if (next >= labels.size())
      throw ValidationError("selection order ended before extraction finished");
    const auto label = labels[next++];
    auto at = tree.find_internal(label);
    if (!at)
      throw ValidationError("tree node " + std::to_string(label) + " is not available");
    return *at;
  });
}

} // namespace avrg
