#include <gtest/gtest.h>

#include "avrg/metrics.hpp"
#include "avrg/spectral.hpp"
#include "avrg/statistics.hpp"
#include "avrg/synthetic.hpp"
#include "support.hpp"

using namespace avrg;
using namespace avrg::testing;

namespace {

AttributedGraph path_or_triangle(bool triangle) {
  AttributedGraph g({"blue"});
  for (int i = 0; i < 3; ++i)
    g.add_node(NodeData::terminal(0));
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  if (triangle)
    g.add_edge(0, 2);
  return g;
}

AttributedGraph relabeled(const AttributedGraph &g, Rng &rng) {
  auto ids = g.node_ids();
  rng.shuffle(ids);
  AttributedGraph h(g.alphabet());
  std::map<NodeId, NodeId> to;
  for (auto id : ids)
    to[id] = h.add_node(g.node(id));
  for (const auto &e : g.edges())
    h.add_edge(to[e.u], to[e.v], e.multiplicity);
  return h;
}

} // namespace

TEST(LambdaDistance, TriangleVersusPath) {
  EXPECT_NEAR(lambda_distance(path_or_triangle(true), path_or_triangle(false)), 2.0, 1e-8);
}

TEST(LambdaDistance, IdentityAndSymmetry) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_test_graph(rng, 30, 2, true);
    const auto b = random_test_graph(rng, 30, 2);
    EXPECT_EQ(lambda_distance(a, a), 0.0);
    EXPECT_NEAR(lambda_distance(a, b), lambda_distance(b, a), 1e-10);
    EXPECT_NEAR(lambda_distance(a, relabeled(a, rng)), 0.0, 1e-8);
  }
}

TEST(LambdaDistance, PadsShorterSpectrumWithZeros) {
  const std::vector<double> a{3, 1}, b{3};
  EXPECT_DOUBLE_EQ(lambda_distance(a, b), 1.0);
}

TEST(LambdaDistance, TriangleInequality) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_test_graph(rng, 20, 2), b = random_test_graph(rng, 20, 2), c = random_test_graph(rng, 20, 2);
    EXPECT_LE(lambda_distance(a, c), lambda_distance(a, b) + lambda_distance(b, c) + 1e-9);
  }
}

TEST(Census, SingleEdge) {
  AttributedGraph g({"blue"});
  g.add_node(NodeData::terminal(0));
  g.add_node(NodeData::terminal(0));
  g.add_edge(0, 1);
  const auto c = colored_graphlet_census(g);
  ASSERT_TRUE(c.has_value());
  ASSERT_EQ(c->size(), 1u);
  EXPECT_EQ(c->begin()->second, 1u);
}

TEST(Census, MonochromeTriangleHasNoInducedPath) {
  const auto c = *colored_graphlet_census(path_or_triangle(true));
  std::map<char, std::uint64_t> by_size;
  for (const auto &[k, n] : c)
    by_size[k[0]] += n;
  EXPECT_EQ(by_size['2'], 3u);
  EXPECT_EQ(by_size['3'], 1u);
  EXPECT_EQ(c.size(), 2u);
}

TEST(Census, KeysDistinguishColorPlacement) {
  // Paths blue-pink-blue and pink-blue-blue share the color multiset but
  // not the structure.
  AttributedGraph a({"blue", "pink"}), b({"blue", "pink"});
  for (std::uint32_t c : {0u, 1u, 0u})
    a.add_node(NodeData::terminal(c));
  for (std::uint32_t c : {1u, 0u, 0u})
    b.add_node(NodeData::terminal(c));
  a.add_edge(0, 1);
  a.add_edge(1, 2);
  b.add_edge(0, 1);
  b.add_edge(1, 2);
  const std::vector<NodeId> all{0, 1, 2};
  EXPECT_NE(graphlet_key(a, all), graphlet_key(b, all));
}

TEST(Census, MatchesExhaustiveEnumeration) {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(rng, 2 + rng.uniform_index(9), 0.2 + 0.5 * rng.uniform01(), 2);
    const auto census = colored_graphlet_census(g);
    ASSERT_TRUE(census.has_value());
    GraphletCensus expected;
    std::map<std::string, std::string> oracle_to_key, key_to_oracle;
    for (const auto &nodes : connected_subsets(g)) {
      const auto key = graphlet_key(g, nodes);
      ++expected[key];
      const auto cls = brute_class(g, nodes);
      // The key must identify exactly the brute-force isomorphism class.
      auto [it1, fresh1] = oracle_to_key.emplace(cls, key);
      EXPECT_EQ(it1->second, key);
      auto [it2, fresh2] = key_to_oracle.emplace(key, cls);
      EXPECT_EQ(it2->second, cls);
    }
    EXPECT_EQ(*census, expected) << trial;
  }
}

TEST(Census, SizeTotalsMatchUncoloredCounts) {
  Rng rng(2);
  const auto g = random_graph(rng, 10, 0.4, 3);
  const auto census = *colored_graphlet_census(g);
  std::map<char, std::uint64_t> by_size, expected;
  for (const auto &[k, n] : census)
    by_size[k[0]] += n;
  for (const auto &s : connected_subsets(g))
    ++expected[static_cast<char>('0' + s.size())];
  EXPECT_EQ(by_size, expected);
}

TEST(Census, GuardReturnsUnavailable) {
  AttributedGraph g(color_names(40)); // 40^4 * 11 > 1e7
  g.add_node(NodeData::terminal(0));
  EXPECT_FALSE(colored_graphlet_census(g).has_value());
}

TEST(Census, MultiEdgesCountOnce) {
  AttributedGraph g({"x"});
  g.add_node(NodeData::terminal(0));
  g.add_node(NodeData::terminal(0));
  g.add_edge(0, 1, 3);
  EXPECT_EQ(colored_graphlet_census(g)->begin()->second, 1u);
}

TEST(InverseCorrelation, Anchors) {
  const GraphletCensus a{{"k1", 1}, {"k2", 2}, {"k3", 3}};
  const GraphletCensus scaled{{"k1", 3}, {"k2", 6}, {"k3", 9}};
  const GraphletCensus reversed{{"k1", 3}, {"k2", 2}, {"k3", 1}};
  EXPECT_NEAR(*graphlet_inverse_correlation(a, a), 0.0, 1e-12);
  EXPECT_NEAR(*graphlet_inverse_correlation(a, scaled), 0.0, 1e-12);
  EXPECT_NEAR(*graphlet_inverse_correlation(a, reversed), 2.0, 1e-12);
  const GraphletCensus flat{{"k1", 2}, {"k2", 2}, {"k3", 2}};
  EXPECT_FALSE(graphlet_inverse_correlation(a, flat).has_value());
}

TEST(InverseCorrelation, MissingKeysCountAsZero) {
  const GraphletCensus a{{"k1", 1}, {"k2", 2}};
  const GraphletCensus b{{"k2", 2}, {"k3", 5}};
  const auto r = pearson({1, 2, 0}, {0, 2, 5});
  EXPECT_NEAR(*graphlet_inverse_correlation(a, b), 1.0 - *r, 1e-12);
}

TEST(Deltas, MatchIndependentRecomputation) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_test_graph(rng, 30, 3), b = random_test_graph(rng, 30, 3);
    const auto d = assortativity_deltas(a, b);
    const auto da = degree_assortativity_oracle(a), db = degree_assortativity_oracle(b);
    ASSERT_EQ(d.degree.has_value(), da && db);
    if (d.degree) {
      EXPECT_NEAR(*d.degree, std::abs(*da - *db), 1e-9);
      EXPECT_LE(*d.degree, 2.0);
    }
    const auto aa = attribute_assortativity_oracle(a), ab = attribute_assortativity_oracle(b);
    ASSERT_EQ(d.attribute.has_value(), aa && ab);
    if (d.attribute) {
      EXPECT_NEAR(*d.attribute, std::abs(*aa - *ab), 1e-9);
    }
  }
}

TEST(Evaluate, SelfComparisonIsZero) {
  const auto g = two_community_fixture().graph;
  const auto r = evaluate(g, g);
  EXPECT_EQ(r.lambda_distance, 0.0);
  EXPECT_EQ(r.delta_degree, 0.0);
  EXPECT_EQ(r.delta_attribute, 0.0);
  ASSERT_TRUE(r.graphlet_inverse_correlation.has_value());
  EXPECT_NEAR(*r.graphlet_inverse_correlation, 0.0, 1e-12);
  EXPECT_EQ(r.spectrum_original, 9u);
  EXPECT_FALSE(r.generated_has_multi_edges);
}

TEST(Evaluate, InvariantUnderRelabeling) {
  Rng rng(12);
  const auto a = random_test_graph(rng, 25, 2);
  const auto b = random_test_graph(rng, 25, 2);
  const auto r1 = evaluate(a, b), r2 = evaluate(relabeled(a, rng), relabeled(b, rng));
  EXPECT_NEAR(*r1.lambda_distance, *r2.lambda_distance, 1e-8);
  if (r1.graphlet_inverse_correlation) {
    EXPECT_NEAR(*r1.graphlet_inverse_correlation, *r2.graphlet_inverse_correlation, 1e-12);
  }
}

TEST(Report, JsonRoundTripIsLossless) {
  Rng rng(1);
  const auto r = evaluate(random_test_graph(rng, 20, 2), random_test_graph(rng, 20, 2, true));
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  EvalReport empty;
  EXPECT_EQ(report_from_json(report_to_json(empty)), empty);
}

TEST(Report, CsvRow) {
  EvalReport r;
  r.lambda_distance = 0.5;
  r.delta_degree = 0.125;
  r.graphlet_inverse_correlation = 1.0;
  EXPECT_EQ(report_csv_row("texas", "avrg", 3, r), "texas,avrg,3,0.5,0.125,,1");
}
