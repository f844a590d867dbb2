#include "avrg/synthetic.hpp"

#include <array>
#include <string>

#include "avrg/error.hpp"
#include "avrg/random.hpp"

namespace avrg {

Fixture two_community_fixture() {
  AttributedGraph g({"blue", "pink"});
  for (char c = 'a'; c <= 'i'; ++c)
    g.add_node(NodeData::terminal(c <= 'e' ? 0 : 1, std::string(1, c)));
  constexpr std::array<const char *, 16> edges{"ab", "bc", "cd", "da", "ae", "ec", "be", "ed",
                                               "ch", "bf", "fg", "gh", "hi", "hf", "fi", "ig"};
  const auto index = g.name_index();
  for (const char *e : edges)
    g.add_edge(index.at(std::string(1, e[0])), index.at(std::string(1, e[1])));
  auto d = parse_dendrogram("(((e,(c,d)),(a,b)),((f,g),(h,i)))", g);
  return Fixture{std::move(g), std::move(d)};
}

void validate_cabam(const CabamConfig &config) {
  if (config.m < 1 || config.n <= config.m)
    throw ValidationError("cabam needs n > m >= 1");
  if (config.num_classes < 2)
    throw ValidationError("cabam needs at least two classes");
  if (!(config.p_c >= 0.0 && config.p_c <= 1.0))
    throw ValidationError("p_c must lie in [0, 1]");
}

AttributedGraph cabam_generate(const CabamConfig &config) {
  validate_cabam(config);
  std::vector<std::string> labels;
  for (std::uint32_t c = 0; c < config.num_classes; ++c)
    labels.push_back("c" + std::to_string(c));
  AttributedGraph g(labels);
  Rng rng(config.seed);

  std::vector<std::uint32_t> cls;
  std::vector<std::uint64_t> degree;
  auto add = [&](std::uint32_t c) {
    cls.push_back(c);
    degree.push_back(0);
    return g.add_node(NodeData::terminal(c, std::to_string(cls.size() - 1)));
  };
  for (std::size_t i = 0; i < config.m; ++i)
    add(static_cast<std::uint32_t>(i % config.num_classes));
  for (NodeId u = 0; u < config.m; ++u)
    for (NodeId v = u + 1; v < config.m; ++v) {
      g.add_edge(u, v);
      ++degree[u];
      ++degree[v];
    }

  std::vector<double> weights;
  for (std::size_t t = config.m; t < config.n; ++t) {
    const auto c = static_cast<std::uint32_t>(rng.uniform_index(config.num_classes));
    const std::size_t existing = cls.size();
    weights.assign(existing, 0.0);
    std::size_t positive = 0;
    for (std::size_t v = 0; v < existing; ++v) {
      const double pref = cls[v] == c ? config.p_c : 1.0 - config.p_c;
      weights[v] = static_cast<double>(degree[v] + 1) * pref;
      positive += weights[v] > 0.0;
    }
    std::vector<char> taken(existing, 0);
    std::vector<NodeId> targets;
    for (std::size_t j = 0; j < config.m; ++j) {
      if (positive == 0)
        for (std::size_t v = 0; v < existing; ++v)
          if (!taken[v]) {
            weights[v] = static_cast<double>(degree[v] + 1);
            ++positive;
          }
      const auto v = rng.weighted_index(weights);
      if (v == weights.size())
        throw InternalError("cabam ran out of attachment targets");
      targets.push_back(static_cast<NodeId>(v));
      taken[v] = 1;
      weights[v] = 0.0;
      --positive;
    }
    const NodeId u = add(c);
    for (NodeId v : targets) {
      g.add_edge(u, v);
      ++degree[u];
      ++degree[v];
    }
  }
  return g;
}

} // namespace avrg
