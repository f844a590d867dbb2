// Independent oracles and random inputs shared by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avrg/dendrogram.hpp"
#include "avrg/graph.hpp"
#include "avrg/random.hpp"

namespace avrg::testing {

inline std::vector<std::string> color_names(std::size_t colors) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < colors; ++c)
    out.push_back("c" + std::to_string(c));
  return out;
}

/// G(n, p) with uniform colors; nodes named n0, n1, ...
inline AttributedGraph random_graph(Rng &rng, std::size_t n, double p, std::size_t colors) {
  AttributedGraph g(color_names(colors));
  for (std::size_t i = 0; i < n; ++i)
    g.add_node(NodeData::terminal(static_cast<std::uint32_t>(rng.uniform_index(colors)), "n" + std::to_string(i)));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.uniform01() < p)
        g.add_edge(u, v);
  return g;
}

/// Random graph that always has at least one edge, with occasional
/// multi-edges when `multi` is set.
inline AttributedGraph random_test_graph(Rng &rng, std::size_t max_n, std::size_t colors, bool multi = false) {
  const std::size_t n = 2 + rng.uniform_index(max_n - 1);
  const double p = 0.1 + 0.5 * rng.uniform01();
  auto g = random_graph(rng, n, p, colors);
  if (g.edge_count() == 0)
    g.add_edge(0, 1);
  if (multi)
    for (const auto &e : g.edges())
      if (rng.uniform01() < 0.2)
        g.add_edge(e.u, e.v, 1 + static_cast<std::uint32_t>(rng.uniform_index(2)));
  return g;
}

/// Random binary tree over the graph's nodes, built by merging random pairs.
inline ClusterTree random_tree(Rng &rng, const AttributedGraph &g) {
  std::vector<ClusterTree> pool;
  for (NodeId id : g.node_ids())
    pool.push_back(ClusterTree::make_leaf(id));
  while (pool.size() > 1) {
    const auto i = rng.uniform_index(pool.size());
    auto a = std::move(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    const auto j = rng.uniform_index(pool.size());
    auto b = std::move(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    pool.push_back(ClusterTree::join({std::move(a), std::move(b)}));
  }
  return pool.front();
}

/// Leaf sets of every internal node of a ClusterTree, gathered recursively.
inline std::set<NodeId> collect_leaf_sets(const ClusterTree &t, std::vector<std::set<NodeId>> &out) {
  if (t.leaf)
    return {*t.leaf};
  std::set<NodeId> all;
  for (const auto &c : t.children) {
    auto s = collect_leaf_sets(c, out);
    all.insert(s.begin(), s.end());
  }
  out.push_back(all);
  return all;
}

/// Exact NDC numerator: sum over edges of kappa times the size of the
/// smallest cluster containing both endpoints.
inline std::uint64_t ndc_numerator_oracle(const ClusterTree &t, const AttributedGraph &g) {
  std::vector<std::set<NodeId>> sets;
  collect_leaf_sets(t, sets);
  std::uint64_t total = 0;
  for (const auto &e : g.edges()) {
    std::size_t best = SIZE_MAX;
    for (const auto &s : sets)
      if (s.contains(e.u) && s.contains(e.v))
        best = std::min(best, s.size());
    total += e.multiplicity * best;
  }
  return total;
}

/// Plain Pearson correlation of paired samples; nullopt on zero variance.
inline std::optional<double> pearson(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  if (x.empty())
    return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 1e-12 * n || syy <= 1e-12 * n)
    return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

/// Degree assortativity as Pearson over the explicit list of oriented edge
/// ends (each edge unit listed in both directions).
inline std::optional<double> degree_assortativity_oracle(const AttributedGraph &g) {
  std::vector<double> x, y;
  for (const auto &e : g.edges())
    for (std::uint32_t k = 0; k < e.multiplicity; ++k) {
      const double du = static_cast<double>(g.degree(e.u)), dv = static_cast<double>(g.degree(e.v));
      x.push_back(du);
      y.push_back(dv);
      x.push_back(dv);
      y.push_back(du);
    }
  return pearson(x, y);
}

/// Categorical assortativity as pooled one-hot Pearson over oriented
/// terminal-terminal edge ends: sum of per-color covariances over sum of
/// per-color variances.
inline std::optional<double> attribute_assortativity_oracle(const AttributedGraph &g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ends;
  for (const auto &e : g.edges()) {
    const auto &a = g.node(e.u), &b = g.node(e.v);
    if (!a.is_terminal() || !b.is_terminal())
      continue;
    for (std::uint32_t k = 0; k < e.multiplicity; ++k) {
      ends.emplace_back(a.attr, b.attr);
      ends.emplace_back(b.attr, a.attr);
    }
  }
  if (ends.empty())
    return std::nullopt;
  const double n = static_cast<double>(ends.size());
  double cov = 0, var = 0;
  for (std::uint32_t c = 0; c < g.alphabet().size(); ++c) {
    double mx = 0, my = 0;
    for (const auto &[s, t] : ends) {
      mx += s == c;
      my += t == c;
    }
    mx /= n;
    my /= n;
    for (const auto &[s, t] : ends) {
      cov += ((s == c) - mx) * ((t == c) - my);
      var += ((s == c) - mx) * ((s == c) - mx);
    }
  }
  if (std::abs(var) < 1e-12)
    return std::nullopt;
  return cov / var;
}

/// Colored-isomorphism class of an induced subgraph: smallest string
/// "colors|adjacency rows" over all orderings of the nodes.
inline std::string brute_class(const AttributedGraph &g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  std::string best;
  bool first = true;
  do {
    std::string s;
    for (NodeId v : nodes)
      s += g.label(g.node(v).attr) + ";";
    s += "|";
    for (NodeId u : nodes)
      for (NodeId v : nodes)
        s += (u != v && g.multiplicity(u, v) > 0) ? '1' : '0';
    if (first || s < best) {
      best = s;
      first = false;
    }
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return best;
}

inline bool induced_connected(const AttributedGraph &g, const std::vector<NodeId> &nodes) {
  std::set<NodeId> in(nodes.begin(), nodes.end()), seen{nodes.front()};
  std::vector<NodeId> stack{nodes.front()};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const auto &[v, _] : g.neighbors(u))
      if (in.contains(v) && seen.insert(v).second)
        stack.push_back(v);
  }
  return seen.size() == nodes.size();
}

/// Every connected 2-, 3- and 4-node subset, by bitmask enumeration.
inline std::vector<std::vector<NodeId>> connected_subsets(const AttributedGraph &g) {
  const auto ids = g.node_ids();
  const std::size_t n = ids.size();
  std::vector<std::vector<NodeId>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k < 2 || k > 4)
      continue;
    std::vector<NodeId> nodes;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i))
        nodes.push_back(ids[i]);
    if (induced_connected(g, nodes))
      out.push_back(std::move(nodes));
  }
  return out;
}

/// Same node names, labels and named edge multiplicities.
inline bool same_named_graph(const AttributedGraph &a, const AttributedGraph &b) {
  auto describe = [](const AttributedGraph &g) {
    std::map<std::string, std::string> nodes;
    for (const auto &[id, d] : g.nodes())
      nodes[g.display_name(id)] = d.is_terminal() ? g.label(d.attr) : "*" + std::to_string(d.size);
    std::map<std::pair<std::string, std::string>, std::uint32_t> edges;
    for (const auto &e : g.edges()) {
      auto x = g.display_name(e.u), y = g.display_name(e.v);
      if (y < x)
        std::swap(x, y);
      edges[{x, y}] = e.multiplicity;
    }
    return std::make_pair(nodes, edges);
  };
  return describe(a) == describe(b);
}

} // namespace avrg::testing
