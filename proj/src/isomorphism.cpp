#include "avrg/isomorphism.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <vector>

namespace avrg {
namespace {

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t value) { return mix(seed ^ mix(value)); }

std::uint64_t hash_string(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t node_key(const AttributedGraph &g, const NodeData &d, const MatchOptions &opt) {
  std::uint64_t h = combine(0x51, static_cast<std::uint64_t>(d.kind));
  h = d.is_terminal() ? combine(h, hash_string(g.label(d.attr))) : combine(h, d.size);
  if (opt.boundary)
    h = combine(h, d.boundary ? *d.boundary + 1ULL : 0ULL);
  return h;
}

bool same_node(const AttributedGraph &ga, const NodeData &a, const AttributedGraph &gb,
               const NodeData &b, const MatchOptions &opt) {
  if (a.kind != b.kind)
    return false;
  if (a.is_terminal() ? ga.label(a.attr) != gb.label(b.attr) : a.size != b.size)
    return false;
  return !opt.boundary || a.boundary == b.boundary;
}

// Dense view of a graph for the matcher.
struct Indexed {
  std::vector<NodeId> ids;
  std::unordered_map<NodeId, std::size_t> pos;
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> adj;

  explicit Indexed(const AttributedGraph &g) {
    ids = g.node_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
      pos.emplace(ids[i], i);
    adj.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (const auto &[v, k] : g.neighbors(ids[i]))
        adj[i].emplace_back(pos.at(v), k);
  }
};

std::vector<std::uint64_t> refine_once(const Indexed &ix, const std::vector<std::uint64_t> &color) {
  std::vector<std::uint64_t> next(color.size());
  std::vector<std::uint64_t> sig;
  for (std::size_t i = 0; i < color.size(); ++i) {
    sig.clear();
    for (const auto &[j, k] : ix.adj[i])
      sig.push_back(combine(color[j], k));
    std::sort(sig.begin(), sig.end());
    std::uint64_t h = combine(0xc0105, color[i]);
    for (auto s : sig)
      h = combine(h, s);
    next[i] = h;
  }
  return next;
}

std::size_t distinct(std::vector<std::uint64_t> c) {
  std::sort(c.begin(), c.end());
  return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

std::vector<std::uint64_t> stable_colors(const AttributedGraph &g, const Indexed &ix,
                                         const MatchOptions &opt, std::size_t rounds) {
  std::vector<std::uint64_t> color(ix.ids.size());
  for (std::size_t i = 0; i < ix.ids.size(); ++i)
    color[i] = node_key(g, g.node(ix.ids[i]), opt);
  std::size_t classes = distinct(color);
  for (std::size_t r = 0; r < rounds; ++r) {
    auto next = refine_once(ix, color);
    const std::size_t c = distinct(next);
    color = std::move(next);
    if (c == classes)
      break;
    classes = c;
  }
  return color;
}

class Matcher {
public:
  Matcher(const AttributedGraph &ga, const AttributedGraph &gb, const MatchOptions &opt)
      : ga_(ga), gb_(gb), opt_(opt), a_(ga), b_(gb) {}

  std::optional<std::map<NodeId, NodeId>> run() {
    const std::size_t n = a_.ids.size();
    // Refine both graphs in lockstep so their color spaces stay comparable.
    std::vector<std::uint64_t> ca(n), cb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ca[i] = node_key(ga_, ga_.node(a_.ids[i]), opt_);
      cb[i] = node_key(gb_, gb_.node(b_.ids[i]), opt_);
    }
    for (std::size_t r = 0; r <= n; ++r) {
      if (!same_histogram(ca, cb))
        return std::nullopt;
      auto na = refine_once(a_, ca);
      auto nb = refine_once(b_, cb);
      const bool stable = distinct(na) == distinct(ca);
      ca = std::move(na);
      cb = std::move(nb);
      if (stable)
        break;
    }
    if (!same_histogram(ca, cb))
      return std::nullopt;
    color_a_ = std::move(ca);
    color_b_ = std::move(cb);

    build_order();
    map_ab_.assign(n, npos);
    map_ba_.assign(n, npos);
    if (!extend(0))
      return std::nullopt;
    std::map<NodeId, NodeId> out;
    for (std::size_t i = 0; i < n; ++i)
      out.emplace(a_.ids[i], b_.ids[map_ab_[i]]);
    return out;
  }

private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static bool same_histogram(std::vector<std::uint64_t> x, std::vector<std::uint64_t> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }

  // Next node = most already-ordered neighbors, then rarest color.
  void build_order() {
    const std::size_t n = a_.ids.size();
    std::unordered_map<std::uint64_t, std::size_t> freq;
    for (auto c : color_a_)
      ++freq[c];
    std::vector<char> placed(n, 0);
    std::vector<std::size_t> links(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t best = npos;
      for (std::size_t i = 0; i < n; ++i) {
        if (placed[i])
          continue;
        if (best == npos || links[i] > links[best] ||
            (links[i] == links[best] && freq[color_a_[i]] < freq[color_a_[best]]))
          best = i;
      }
      placed[best] = 1;
      order_.push_back(best);
      for (const auto &[j, _] : a_.adj[best])
        ++links[j];
    }
  }

  bool feasible(std::size_t u, std::size_t v) const {
    if (color_a_[u] != color_b_[v])
      return false;
    if (!same_node(ga_, ga_.node(a_.ids[u]), gb_, gb_.node(b_.ids[v]), opt_))
      return false;
    std::size_t mapped_a = 0, mapped_b = 0;
    for (const auto &[j, k] : a_.adj[u]) {
      if (map_ab_[j] == npos)
        continue;
      ++mapped_a;
      if (gb_.multiplicity(b_.ids[v], b_.ids[map_ab_[j]]) != k)
        return false;
    }
    for (const auto &[j, _] : b_.adj[v])
      if (map_ba_[j] != npos)
        ++mapped_b;
    return mapped_a == mapped_b;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size())
      return true;
    const std::size_t u = order_[depth];
    for (std::size_t v = 0; v < b_.ids.size(); ++v) {
      if (map_ba_[v] != npos || !feasible(u, v))
        continue;
      map_ab_[u] = v;
      map_ba_[v] = u;
      if (extend(depth + 1))
        return true;
      map_ab_[u] = npos;
      map_ba_[v] = npos;
    }
    return false;
  }

  const AttributedGraph &ga_;
  const AttributedGraph &gb_;
  MatchOptions opt_;
  Indexed a_, b_;
  std::vector<std::uint64_t> color_a_, color_b_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_ab_, map_ba_;
};

} // namespace

std::optional<std::map<NodeId, NodeId>> find_isomorphism(const AttributedGraph &a,
                                                         const AttributedGraph &b,
                                                         MatchOptions options) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count() ||
      a.edge_pair_count() != b.edge_pair_count())
    return std::nullopt;
  return Matcher(a, b, options).run();
}

bool isomorphic(const AttributedGraph &a, const AttributedGraph &b, MatchOptions options) {
  return find_isomorphism(a, b, options).has_value();
}

std::string invariant_signature(const AttributedGraph &g, MatchOptions options) {
  Indexed ix(g);
  auto colors = stable_colors(g, ix, options, ix.ids.size());
  std::sort(colors.begin(), colors.end());
  std::uint64_t h = combine(g.node_count(), g.edge_count());
  for (auto c : colors)
    h = combine(h, c);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace avrg
