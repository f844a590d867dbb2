#include "avrg/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "avrg/error.hpp"
#include "avrg/spectral.hpp"
#include "avrg/statistics.hpp"

namespace avrg {

double lambda_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    sum += (x - y) * (x - y);
  }
  return std::sqrt(sum);
}

double lambda_distance(const AttributedGraph &a, const AttributedGraph &b) {
  const auto sa = spectral::laplacian_spectrum(a);
  const auto sb = spectral::laplacian_spectrum(b);
  return lambda_distance(sa, sb);
}

AssortativityDeltas assortativity_deltas(const AttributedGraph &original,
                                         const AttributedGraph &generated) {
  AssortativityDeltas out;
  const auto d0 = degree_assortativity(original);
  const auto d1 = degree_assortativity(generated);
  if (d0 && d1)
    out.degree = std::abs(*d0 - *d1);
  const auto a0 = attribute_assortativity(original);
  const auto a1 = attribute_assortativity(generated);
  if (a0 && a1)
    out.attribute = std::abs(*a0 - *a1);
  return out;
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::string color_name(const AttributedGraph &g, const NodeData &d) {
  return d.is_terminal() ? g.label(d.attr) : "*" + std::to_string(d.size);
}

// Canonicalizes a k-node pattern given its adjacency matrix and color ranks.
struct Pattern {
  int k;
  std::array<std::array<bool, 4>, 4> adj{};
  std::array<std::string, 4> colors;
};

std::string canonical(const Pattern &p) {
  std::array<int, 4> perm{0, 1, 2, 3};
  unsigned best_mask = ~0u;
  std::vector<std::string> best_colors;
  do {
    unsigned mask = 0;
    int bit = 0;
    for (const auto &[i, j] : kPairs) {
      if (i >= p.k || j >= p.k)
        continue;
      if (p.adj[perm[i]][perm[j]])
        mask |= 1u << bit;
      ++bit;
    }
    std::vector<std::string> colors;
    for (int i = 0; i < p.k; ++i)
      colors.push_back(p.colors[perm[i]]);
    if (mask < best_mask || (mask == best_mask && colors < best_colors)) {
      best_mask = mask;
      best_colors = std::move(colors);
    }
  } while (std::next_permutation(perm.begin(), perm.begin() + p.k));
  std::string key = std::to_string(p.k) + ":" + std::to_string(best_mask) + ":";
  for (int i = 0; i < p.k; ++i) {
    if (i)
      key += ',';
    key += best_colors[i];
  }
  return key;
}

} // namespace

std::string graphlet_key(const AttributedGraph &g, std::span<const NodeId> nodes) {
  if (nodes.size() < 2 || nodes.size() > 4)
    throw InternalError("graphlet_key: expected 2 to 4 nodes");
  Pattern p;
  p.k = static_cast<int>(nodes.size());
  for (int i = 0; i < p.k; ++i) {
    p.colors[i] = color_name(g, g.node(nodes[i]));
    for (int j = 0; j < p.k; ++j)
      p.adj[i][j] = i != j && g.multiplicity(nodes[i], nodes[j]) > 0;
  }
  return canonical(p);
}

std::optional<GraphletCensus> colored_graphlet_census(const AttributedGraph &g) {
  const double colors = static_cast<double>(std::max<std::size_t>(g.alphabet().size(), 1));
  if (std::pow(colors, 4.0) * 11.0 > static_cast<double>(kCensusMaxKeys))
    return std::nullopt;

  const auto ids = g.node_ids();
  const std::size_t n = ids.size();
  std::unordered_map<NodeId, std::uint32_t> index;
  for (std::uint32_t i = 0; i < n; ++i)
    index.emplace(ids[i], i);
  std::vector<std::vector<std::uint32_t>> adj(n);
  std::vector<std::uint32_t> color(n);
  std::vector<std::string> color_names;
  std::map<std::string, std::uint32_t> color_rank;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto name = color_name(g, g.node(ids[i]));
    auto [it, fresh] = color_rank.try_emplace(name, static_cast<std::uint32_t>(color_names.size()));
    if (fresh)
      color_names.push_back(name);
    color[i] = it->second;
    for (const auto &[v, _] : g.neighbors(ids[i]))
      adj[i].push_back(index.at(v));
    std::sort(adj[i].begin(), adj[i].end());
  }
  auto linked = [&](std::uint32_t a, std::uint32_t b) {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  };

  // Raw code: k, adjacency bits in member order, color ranks. Many member
  // sets share a code, so canonicalization runs once per distinct code.
  std::unordered_map<std::uint64_t, std::uint64_t> raw;
  std::array<std::uint32_t, 4> members{};
  auto record = [&](int k) {
    std::uint64_t code = static_cast<std::uint64_t>(k);
    int bit = 0;
    for (const auto &[i, j] : kPairs) {
      if (i >= k || j >= k)
        continue;
      if (linked(members[i], members[j]))
        code |= 1ull << (3 + bit);
      ++bit;
    }
    for (int i = 0; i < k; ++i)
      code |= static_cast<std::uint64_t>(color[members[i]]) << (9 + 12 * i);
    ++raw[code];
  };

  // ESU enumeration: each connected set is reached exactly once, from its
  // smallest member, and recorded at every size from 2 to 4.
  std::vector<char> in_set(n, 0);
  std::vector<std::uint32_t> neighborhood_mark(n, 0);
  auto extend = [&](auto &&self, int k, std::vector<std::uint32_t> extension, std::uint32_t root) -> void {
    if (k >= 2)
      record(k);
    if (k == 4)
      return;
    while (!extension.empty()) {
      const std::uint32_t w = extension.back();
      extension.pop_back();
      std::vector<std::uint32_t> next = extension;
      for (std::uint32_t u : adj[w]) {
        if (u <= root || in_set[u] || neighborhood_mark[u] > 0)
          continue;
        if (std::find(next.begin(), next.end(), u) == next.end())
          next.push_back(u);
      }
      members[k] = w;
      in_set[w] = 1;
      for (std::uint32_t u : adj[w])
        ++neighborhood_mark[u];
      self(self, k + 1, std::move(next), root);
      for (std::uint32_t u : adj[w])
        --neighborhood_mark[u];
      in_set[w] = 0;
    }
  };
  for (std::uint32_t v = 0; v < n; ++v) {
    members[0] = v;
    in_set[v] = 1;
    for (std::uint32_t u : adj[v])
      ++neighborhood_mark[u];
    std::vector<std::uint32_t> extension;
    for (std::uint32_t u : adj[v])
      if (u > v)
        extension.push_back(u);
    extend(extend, 1, std::move(extension), v);
    for (std::uint32_t u : adj[v])
      --neighborhood_mark[u];
    in_set[v] = 0;
  }

  GraphletCensus census;
  for (const auto &[code, count] : raw) {
    Pattern p;
    p.k = static_cast<int>(code & 7u);
    int bit = 0;
    for (const auto &[i, j] : kPairs) {
      if (i >= p.k || j >= p.k)
        continue;
      const bool e = (code >> (3 + bit)) & 1u;
      p.adj[i][j] = p.adj[j][i] = e;
      ++bit;
    }
    for (int i = 0; i < p.k; ++i)
      p.colors[i] = color_names[(code >> (9 + 12 * i)) & 0xfffu];
    census[canonical(p)] += count;
  }
  return census;
}

std::optional<double> graphlet_inverse_correlation(const GraphletCensus &a, const GraphletCensus &b) {
  std::set<std::string> keys;
  for (const auto &[k, _] : a)
    keys.insert(k);
  for (const auto &[k, _] : b)
    keys.insert(k);
  if (keys.empty())
    return std::nullopt;
  std::vector<double> x, y;
  for (const auto &k : keys) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    x.push_back(ia == a.end() ? 0.0 : static_cast<double>(ia->second));
    y.push_back(ib == b.end() ? 0.0 : static_cast<double>(ib->second));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    return std::nullopt;
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return 1.0 - r;
}

EvalReport evaluate(const AttributedGraph &original, const AttributedGraph &generated) {
  EvalReport report;
  const auto s0 = spectral::laplacian_spectrum(original);
  const auto s1 = spectral::laplacian_spectrum(generated);
  report.spectrum_original = s0.size();
  report.spectrum_generated = s1.size();
  if (!s0.empty() && !s1.empty())
    report.lambda_distance = lambda_distance(s0, s1);
  const auto deltas = assortativity_deltas(original, generated);
  report.delta_degree = deltas.degree;
  report.delta_attribute = deltas.attribute;
  const auto c0 = colored_graphlet_census(original);
  const auto c1 = colored_graphlet_census(generated);
  if (c0 && c1) {
    std::set<std::string> keys;
    for (const auto &[k, _] : *c0)
      keys.insert(k);
    for (const auto &[k, _] : *c1)
      keys.insert(k);
    report.graphlet_keys = keys.size();
    report.graphlet_inverse_correlation = graphlet_inverse_correlation(*c0, *c1);
  }
  generated.for_each_edge([&](NodeId, NodeId, std::uint32_t k) {
    report.generated_has_multi_edges = report.generated_has_multi_edges || k > 1;
  });
  return report;
}

std::string format_number(std::optional<double> value) {
  if (!value)
    return {};
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, *value);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::json optional_json(std::optional<double> v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  return j.at(key).get<double>();
}

} // namespace

std::string report_to_json(const EvalReport &r) {
  nlohmann::json j;
  j["lambda_distance"] = optional_json(r.lambda_distance);
  j["delta_degree_assortativity"] = optional_json(r.delta_degree);
  j["delta_attribute_assortativity"] = optional_json(r.delta_attribute);
  j["graphlet_one_minus_r"] = optional_json(r.graphlet_inverse_correlation);
  j["meta"] = {{"spectrum_original", r.spectrum_original},
               {"spectrum_generated", r.spectrum_generated},
               {"graphlet_keys", r.graphlet_keys},
               {"generated_has_multi_edges", r.generated_has_multi_edges}};
  return j.dump(2);
}

EvalReport report_from_json(const std::string &text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.lambda_distance = optional_from(j, "lambda_distance");
    r.delta_degree = optional_from(j, "delta_degree_assortativity");
    r.delta_attribute = optional_from(j, "delta_attribute_assortativity");
    r.graphlet_inverse_correlation = optional_from(j, "graphlet_one_minus_r");
    const auto &meta = j.at("meta");
    r.spectrum_original = meta.at("spectrum_original").get<std::size_t>();
    r.spectrum_generated = meta.at("spectrum_generated").get<std::size_t>();
    r.graphlet_keys = meta.at("graphlet_keys").get<std::size_t>();
    r.generated_has_multi_edges = meta.at("generated_has_multi_edges").get<bool>();
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("invalid report: ") + e.what());
  }
}

std::string report_csv_row(const std::string &dataset, const std::string &model, std::size_t trial,
                           const EvalReport &r) {
  return dataset + "," + model + "," + std::to_string(trial) + "," + format_number(r.lambda_distance) +
         "," + format_number(r.delta_degree) + "," + format_number(r.delta_attribute) + "," +
         format_number(r.graphlet_inverse_correlation);
}

} // namespace avrg
