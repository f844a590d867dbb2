#include "avrg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

#include "avrg/error.hpp"
#include "avrg/spectral.hpp"

namespace avrg {
namespace {

// Weighted view of an induced subgraph, indexed 0..n-1. Aggregated Louvain
// levels reuse it with self-loop weights.
struct LocalGraph {
  std::vector<NodeId> ids;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self;

  LocalGraph() = default;

  LocalGraph(const AttributedGraph &g, std::span<const NodeId> nodes)
      : ids(nodes.begin(), nodes.end()), adj(nodes.size()), self(nodes.size(), 0.0) {
    std::unordered_map<NodeId, std::uint32_t> index;
    index.reserve(ids.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i)
      index.emplace(ids[i], i);
    for (std::uint32_t i = 0; i < ids.size(); ++i)
      for (const auto &[v, k] : g.neighbors(ids[i])) {
        auto it = index.find(v);
        if (it != index.end())
          adj[i].emplace_back(it->second, static_cast<double>(k));
      }
  }

  std::size_t size() const { return adj.size(); }

  double degree(std::size_t i) const {
    double d = 2.0 * self[i];
    for (const auto &[_, w] : adj[i])
      d += w;
    return d;
  }

  std::vector<std::vector<std::uint32_t>> components() const {
    std::vector<int> comp(size(), -1);
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint32_t s = 0; s < size(); ++s) {
      if (comp[s] >= 0)
        continue;
      const int c = static_cast<int>(out.size());
      out.emplace_back();
      std::deque<std::uint32_t> queue{s};
      comp[s] = c;
      while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        out.back().push_back(u);
        for (const auto &[v, _] : adj[u])
          if (comp[v] < 0) {
            comp[v] = c;
            queue.push_back(v);
          }
      }
    }
    return out;
  }
};

std::vector<std::uint32_t> renumber(const std::vector<std::uint32_t> &labels) {
  std::unordered_map<std::uint32_t, std::uint32_t> fresh;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, _] = fresh.try_emplace(labels[i], static_cast<std::uint32_t>(fresh.size()));
    out[i] = it->second;
  }
  return out;
}

std::uint32_t count_labels(const std::vector<std::uint32_t> &labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<std::uint32_t> local_moving(const LocalGraph &g, Rng &rng) {
  const std::size_t n = g.size();
  std::vector<double> k(n), tot(n);
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = g.degree(i);
    tot[i] = k[i];
    m2 += k[i];
  }
  std::vector<std::uint32_t> comm(n);
  for (std::uint32_t i = 0; i < n; ++i)
    comm[i] = i;
  if (m2 == 0.0)
    return comm;

  std::vector<std::uint32_t> order(comm);
  rng.shuffle(order);
  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  constexpr int kMaxPasses = 100;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (std::uint32_t i : order) {
      const std::uint32_t own = comm[i];
      touched.clear();
      touched.push_back(own);
      seen[own] = 1;
      for (const auto &[j, w] : g.adj[i]) {
        const auto c = comm[j];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[own] -= k[i];
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * k[i] / m2;
      for (auto c : touched) {
        const double gain = link[c] - tot[c] * k[i] / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k[i];
      comm[i] = best;
      moved = moved || best != own;
      for (auto c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
    }
    if (!moved)
      break;
  }
  return renumber(comm);
}

LocalGraph aggregate(const LocalGraph &g, const std::vector<std::uint32_t> &comm) {
  const std::uint32_t c = count_labels(comm);
  LocalGraph out;
  out.ids.assign(c, 0);
  out.adj.assign(c, {});
  out.self.assign(c, 0.0);
  std::vector<std::unordered_map<std::uint32_t, double>> merged(c);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.self[comm[i]] += g.self[i];
    for (const auto &[j, w] : g.adj[i]) {
      if (comm[i] == comm[j])
        out.self[comm[i]] += 0.5 * w;
      else
        merged[comm[i]][comm[j]] += w;
    }
  }
  for (std::uint32_t a = 0; a < c; ++a) {
    for (const auto &[b, w] : merged[a])
      out.adj[a].emplace_back(b, w);
    std::sort(out.adj[a].begin(), out.adj[a].end());
  }
  return out;
}

class Builder {
public:
  Builder(const AttributedGraph &g, ClusteringMethod method, std::uint64_t seed)
      : g_(g), method_(method), rng_(seed) {}

  ClusterTree build(const std::vector<NodeId> &nodes, bool top) {
    if (nodes.size() == 1)
      return ClusterTree::make_leaf(nodes[0]);
    if (nodes.size() == 2)
      return ClusterTree::join({ClusterTree::make_leaf(nodes[0]), ClusterTree::make_leaf(nodes[1])});

    LocalGraph local(g_, nodes);
    auto comps = local.components();
    if (comps.size() > 1) {
      if (top)
        std::cerr << "warning: graph has " << comps.size()
                  << " connected components; joining them under a synthetic root\n";
      std::vector<ClusterTree> kids;
      for (const auto &comp : comps)
        kids.push_back(build(select(nodes, comp), false));
      return ClusterTree::join(std::move(kids));
    }

    switch (method_) {
    case ClusteringMethod::Louvain: {
      auto levels = louvain_levels(g_, nodes, rng_);
      if (levels.empty() || count_labels(levels.front()) < 2)
        return bisect(nodes);
      std::vector<std::uint32_t> all(nodes.size());
      for (std::uint32_t i = 0; i < all.size(); ++i)
        all[i] = i;
      return layered(nodes, levels, all, static_cast<int>(levels.size()) - 1);
    }
    case ClusteringMethod::LabelPropagation: {
      auto labels = label_propagation(g_, nodes, rng_);
      const auto groups = group_by(labels);
      if (groups.size() < 2)
        return bisect(nodes);
      std::vector<ClusterTree> kids;
      for (const auto &grp : groups)
        kids.push_back(build(select(nodes, grp), false));
      return ClusterTree::join(std::move(kids));
    }
    case ClusteringMethod::ConductanceBisection:
      return bisect(nodes);
    }
    throw InternalError("unhandled clustering method");
  }

private:
  static std::vector<NodeId> select(const std::vector<NodeId> &nodes,
                                    const std::vector<std::uint32_t> &idx) {
    std::vector<NodeId> out;
    out.reserve(idx.size());
    for (auto i : idx)
      out.push_back(nodes[i]);
    return out;
  }

  // Groups of positions, ordered by first appearance.
  static std::vector<std::vector<std::uint32_t>> group_by(const std::vector<std::uint32_t> &labels,
                                                          const std::vector<std::uint32_t> *subset = nullptr) {
    std::unordered_map<std::uint32_t, std::size_t> slot;
    std::vector<std::vector<std::uint32_t>> groups;
    const std::size_t n = subset ? subset->size() : labels.size();
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = subset ? (*subset)[k] : static_cast<std::uint32_t>(k);
      auto [it, fresh] = slot.try_emplace(labels[i], groups.size());
      if (fresh)
        groups.emplace_back();
      groups[it->second].push_back(i);
    }
    return groups;
  }

  ClusterTree layered(const std::vector<NodeId> &nodes,
                      const std::vector<std::vector<std::uint32_t>> &levels,
                      const std::vector<std::uint32_t> &members, int level) {
    if (level < 0)
      return build(select(nodes, members), false);
    auto groups = group_by(levels[static_cast<std::size_t>(level)], &members);
    if (groups.size() == 1)
      return layered(nodes, levels, members, level - 1);
    std::vector<ClusterTree> kids;
    for (const auto &grp : groups)
      kids.push_back(layered(nodes, levels, grp, level - 1));
    return ClusterTree::join(std::move(kids));
  }

  ClusterTree bisect(const std::vector<NodeId> &nodes) {
    auto [a, b] = conductance_bisection(g_, nodes);
    return ClusterTree::join({build(a, false), build(b, false)});
  }

  const AttributedGraph &g_;
  ClusteringMethod method_;
  Rng rng_;
};

} // namespace

std::optional<ClusteringMethod> parse_clustering_method(std::string_view name) {
  if (name == "louvain")
    return ClusteringMethod::Louvain;
  if (name == "conductance" || name == "conductance-bisection")
    return ClusteringMethod::ConductanceBisection;
  if (name == "label-prop" || name == "label-propagation")
    return ClusteringMethod::LabelPropagation;
  return std::nullopt;
}

std::string_view to_string(ClusteringMethod method) {
  switch (method) {
  case ClusteringMethod::Louvain:
    return "louvain";
  case ClusteringMethod::ConductanceBisection:
    return "conductance";
  case ClusteringMethod::LabelPropagation:
    return "label-prop";
  }
  return "unknown";
}

std::vector<std::vector<std::uint32_t>> louvain_levels(const AttributedGraph &g,
                                                       std::span<const NodeId> nodes, Rng &rng) {
  LocalGraph level(g, nodes);
  std::vector<std::uint32_t> assign(nodes.size());
  for (std::uint32_t i = 0; i < assign.size(); ++i)
    assign[i] = i;
  std::vector<std::vector<std::uint32_t>> levels;
  constexpr int kMaxLevels = 64;
  for (int round = 0; round < kMaxLevels; ++round) {
    auto comm = local_moving(level, rng);
    const auto c = count_labels(comm);
    if (c == level.size())
      break;
    for (auto &a : assign)
      a = comm[a];
    levels.push_back(assign);
    if (c <= 1)
      break;
    level = aggregate(level, comm);
  }
  return levels;
}

double conductance(const AttributedGraph &g, std::span<const NodeId> nodes,
                   std::span<const NodeId> side) {
  LocalGraph local(g, nodes);
  std::unordered_map<NodeId, bool> in;
  for (NodeId id : nodes)
    in[id] = false;
  for (NodeId id : side)
    in[id] = true;
  double cut = 0.0, vol_in = 0.0, vol_total = 0.0;
  for (std::size_t i = 0; i < local.size(); ++i) {
    const double d = local.degree(i);
    vol_total += d;
    if (!in[local.ids[i]])
      continue;
    vol_in += d;
    for (const auto &[j, w] : local.adj[i])
      if (!in[local.ids[j]])
        cut += w;
  }
  const double denom = std::min(vol_in, vol_total - vol_in);
  return denom > 0.0 ? cut / denom : std::numeric_limits<double>::infinity();
}

std::pair<std::vector<NodeId>, std::vector<NodeId>>
conductance_bisection(const AttributedGraph &g, std::span<const NodeId> nodes) {
  const std::size_t n = nodes.size();
  if (n < 2)
    throw InternalError("conductance_bisection needs at least two nodes");
  LocalGraph local(g, nodes);
  std::vector<double> deg(n), inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = local.degree(i);
    inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  }

  std::vector<double> fiedler(n, 0.0);
  constexpr std::size_t kDenseLimit = 64;
  if (n <= kDenseLimit) {
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
      if (deg[i] == 0.0)
        lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
      for (const auto &[j, w] : local.adj[i])
        lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= w * inv_sqrt[i] * inv_sqrt[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    for (std::size_t i = 0; i < n; ++i)
      fiedler[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), 1);
  } else {
    // Largest non-trivial eigenvector of I + D^-1/2 A D^-1/2 is the Fiedler
    // vector of the normalized Laplacian.
    std::vector<double> trivial(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trivial[i] = std::sqrt(deg[i]);
      norm += deg[i];
    }
    for (auto &x : trivial)
      x /= std::sqrt(norm);
    spectral::MatVec op = [&](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (const auto &[j, w] : local.adj[i])
          s += w * inv_sqrt[i] * inv_sqrt[j] * x[j];
        y[i] = s;
      }
    };
    std::vector<std::vector<double>> deflate{trivial};
    auto pairs = spectral::lanczos_largest(op, n, 1, std::min<std::size_t>(n - 1, 200), deflate,
                                           0x9e3779b97f4a7c15ULL ^ n, true);
    if (!pairs.empty())
      fiedler = std::move(pairs.front().vector);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i)
    order[i] = i;
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i)
    score[i] = fiedler[i] * inv_sqrt[i];
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b])
      return score[a] < score[b];
    return nodes[a] < nodes[b];
  });

  double vol_total = 0.0;
  for (double d : deg)
    vol_total += d;
  std::vector<char> in(n, 0);
  double cut = 0.0, vol = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_prefix = 1;
  auto imbalance = [&](std::size_t k) {
    return k * 2 > n ? k * 2 - n : n - k * 2;
  };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t u = order[k];
    double to_s = 0.0;
    for (const auto &[j, w] : local.adj[u])
      if (in[j])
        to_s += w;
    cut += deg[u] - 2.0 * to_s;
    vol += deg[u];
    in[u] = 1;
    const double denom = std::min(vol, vol_total - vol);
    const double phi = denom > 0.0 ? cut / denom : std::numeric_limits<double>::infinity();
    const std::size_t size = k + 1;
    if (phi < best - 1e-12 || (std::abs(phi - best) <= 1e-12 && imbalance(size) < imbalance(best_prefix))) {
      best = phi;
      best_prefix = size;
    }
  }

  std::vector<NodeId> a, b;
  for (std::size_t k = 0; k < n; ++k)
    (k < best_prefix ? a : b).push_back(nodes[order[k]]);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (b.front() < a.front())
    std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::vector<std::uint32_t> label_propagation(const AttributedGraph &g,
                                             std::span<const NodeId> nodes, Rng &rng) {
  LocalGraph local(g, nodes);
  const std::size_t n = local.size();
  std::vector<std::uint32_t> labels(n);
  for (std::uint32_t i = 0; i < n; ++i)
    labels[i] = i;
  std::vector<std::uint32_t> order(labels);
  std::unordered_map<std::uint32_t, double> weight;
  std::vector<std::uint32_t> best;
  constexpr int kMaxRounds = 100;
  for (int round = 0; round < kMaxRounds; ++round) {
    rng.shuffle(order);
    bool changed = false;
    for (auto i : order) {
      if (local.adj[i].empty())
        continue;
      weight.clear();
      for (const auto &[j, w] : local.adj[i])
        weight[labels[j]] += w;
      double top = 0.0;
      for (const auto &[_, w] : weight)
        top = std::max(top, w);
      best.clear();
      for (const auto &[l, w] : weight)
        if (w >= top - 1e-12)
          best.push_back(l);
      std::sort(best.begin(), best.end());
      if (std::find(best.begin(), best.end(), labels[i]) != best.end())
        continue;
      labels[i] = best[rng.uniform_index(best.size())];
      changed = true;
    }
    if (!changed)
      break;
  }
  return renumber(labels);
}

Dendrogram build_dendrogram(const AttributedGraph &g, ClusteringMethod method,
                            std::uint64_t seed) {
  if (g.node_count() == 0)
    throw ValidationError("cannot cluster an empty graph");
  Builder builder(g, method, seed);
  return Dendrogram(builder.build(g.node_ids(), true));
}

Dendrogram random_caterpillar(const AttributedGraph &g, std::uint64_t seed) {
  if (g.node_count() == 0)
    throw ValidationError("cannot build a dendrogram over an empty graph");
  auto ids = g.node_ids();
  Rng rng(seed);
  rng.shuffle(ids);
  ClusterTree tree = ClusterTree::make_leaf(ids[0]);
  for (std::size_t i = 1; i < ids.size(); ++i)
    tree = ClusterTree::join({std::move(tree), ClusterTree::make_leaf(ids[i])});
  return Dendrogram(tree);
}

} // namespace avrg
