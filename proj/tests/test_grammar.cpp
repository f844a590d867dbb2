#include <gtest/gtest.h>

#include <cmath>

#include "avrg/error.hpp"
#include "avrg/extractor.hpp"
#include "avrg/grammar.hpp"
#include "avrg/grammar_io.hpp"
#include "avrg/isomorphism.hpp"
#include "avrg/synthetic.hpp"
#include "support.hpp"

using namespace avrg;
using namespace avrg::testing;

namespace {

// Triangle of `attr` terminals with the given boundary degrees.
Rule triangle(std::vector<std::uint32_t> boundary, std::uint32_t attr = 0) {
  Rule r;
  r.rhs = AttributedGraph({"blue", "pink"});
  for (auto b : boundary) {
    auto d = NodeData::terminal(attr);
    d.boundary = b;
    r.rhs.add_node(d);
  }
  r.rhs.add_edge(0, 1);
  r.rhs.add_edge(1, 2);
  r.rhs.add_edge(0, 2);
  r.lhs = 0;
  for (auto b : boundary)
    r.lhs += b;
  return r;
}

AttributedGraph permuted(const AttributedGraph &g, Rng &rng) {
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

Rule start_rule_with(std::uint32_t size) {
  Rule r;
  r.rhs = AttributedGraph({"blue", "pink"});
  auto d = NodeData::nonterminal(size);
  d.boundary = 0;
  r.rhs.add_node(d);
  auto t = NodeData::terminal(0);
  t.boundary = 0;
  r.rhs.add_node(t);
  r.rhs.add_edge(0, 1, size);
  r.lhs = 0;
  return r;
}

} // namespace

TEST(Isomorphism, PermutedGraphsMatchWithVerifiedMapping) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_test_graph(rng, 20, 3, true);
    const auto h = permuted(g, rng);
    const auto map = find_isomorphism(g, h);
    ASSERT_TRUE(map.has_value()) << trial;
    for (const auto &[u, v] : *map)
      EXPECT_EQ(g.node(u).attr, h.node(v).attr);
    for (const auto &e : g.edges())
      EXPECT_EQ(h.multiplicity(map->at(e.u), map->at(e.v)), e.multiplicity);
    EXPECT_EQ(invariant_signature(g), invariant_signature(h));
  }
}

TEST(Isomorphism, ColorOrMultiplicityChangeBreaksIt) {
  Rng rng(4);
  auto g = random_test_graph(rng, 15, 2);
  auto h = permuted(g, rng);
  auto recolored = h;
  const NodeId first = recolored.node_ids().front();
  auto data = recolored.node(first);
  data.attr = 1 - data.attr;
  recolored.remove_node(first);
  recolored.insert_node(first, data);
  for (const auto &[v, k] : h.neighbors(first))
    recolored.add_edge(first, v, k);
  EXPECT_FALSE(isomorphic(g, recolored));

  auto heavier = h;
  const auto e = heavier.edges().front();
  heavier.add_edge(e.u, e.v);
  EXPECT_FALSE(isomorphic(g, heavier));
}

TEST(Isomorphism, BoundaryDegreesMatterUnlessDisabled) {
  const auto a = triangle({1, 2, 2});
  const auto b = triangle({2, 2, 1});
  const auto c = triangle({1, 1, 3});
  EXPECT_TRUE(isomorphic(a.rhs, b.rhs));
  EXPECT_FALSE(isomorphic(a.rhs, c.rhs));
  EXPECT_TRUE(isomorphic(a.rhs, c.rhs, {.boundary = false}));
}

TEST(Isomorphism, RegularNonIsomorphicPairIsRejected) {
  // C6 versus two triangles: same degree sequence, refinement cannot split.
  AttributedGraph c6({"x"}), tt({"x"});
  for (int i = 0; i < 6; ++i) {
    c6.add_node(NodeData::terminal(0));
    tt.add_node(NodeData::terminal(0));
  }
  for (NodeId i = 0; i < 6; ++i)
    c6.add_edge(i, (i + 1) % 6);
  for (NodeId base : {0u, 3u})
    for (NodeId i = 0; i < 3; ++i)
      tt.add_edge(base + i, base + (i + 1) % 3);
  EXPECT_FALSE(isomorphic(c6, tt));
}

TEST(Rule, ValidationCatchesBrokenInvariants) {
  EXPECT_NO_THROW(validate_rule(triangle({1, 2, 2})));
  auto bad = triangle({1, 2, 2});
  bad.lhs = 4;
  EXPECT_THROW(validate_rule(bad), ValidationError);
  auto zero = triangle({1, 2, 2});
  zero.frequency = 0;
  EXPECT_THROW(validate_rule(zero), ValidationError);
  Rule empty;
  EXPECT_THROW(validate_rule(empty), ValidationError);
}

TEST(Grammar, UpsertMergesIsomorphicRules) {
  Grammar g({"blue", "pink"});
  const auto first = g.upsert(triangle({1, 2, 2}));
  EXPECT_FALSE(first.merged);
  const auto second = g.upsert(triangle({2, 1, 2}));
  EXPECT_TRUE(second.merged);
  EXPECT_EQ(second.index, first.index);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(g.rule(0).frequency, 2u);
  // The map sends the candidate's boundary-1 node onto the stored one.
  EXPECT_EQ(second.position_map.at(1), 0u);
  const auto third = g.upsert(triangle({1, 2, 2}, 1));
  EXPECT_FALSE(third.merged);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.total_frequency(), 3u);
}

TEST(Grammar, NoTwoStoredRulesAreIsomorphic) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto input = random_test_graph(rng, 25, 2);
    const auto tree = random_tree(rng, input);
    const auto result = extract_grammar(input, Dendrogram(tree), {3, 0});
    const auto &rules = result.grammar.rules();
    for (std::size_t i = 0; i < rules.size(); ++i)
      for (std::size_t j = i + 1; j < rules.size(); ++j)
        if (rules[i].lhs == rules[j].lhs) {
          EXPECT_FALSE(isomorphic(rules[i].rhs, rules[j].rhs)) << trial;
        }
  }
}

TEST(Grammar, ClosureChecks) {
  Grammar g({"blue", "pink"});
  g.append(triangle({1, 2, 2}));
  EXPECT_THROW(g.check_closure(), ValidationError); // no start rule
  g.append(start_rule_with(3));
  EXPECT_THROW(g.check_closure(), ValidationError); // size 3 has no rule, 5 unused
  Grammar ok({"blue", "pink"});
  ok.append(start_rule_with(5));
  ok.append(triangle({1, 2, 2}));
  EXPECT_NO_THROW(ok.check_closure());
}

TEST(Grammar, CanonicalizeSortsAndReportsPermutation) {
  Grammar g({"blue", "pink"});
  g.append(triangle({1, 2, 2}));
  g.append(start_rule_with(5));
  const auto remap = g.canonicalize();
  EXPECT_EQ(remap, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(g.rule(0).lhs, 0u);
}

TEST(Grammar, TopRulesByFrequency) {
  Grammar g({"blue", "pink"});
  g.upsert(triangle({1, 2, 2}, 1));
  g.upsert(triangle({1, 2, 2}));
  g.upsert(triangle({2, 2, 1}));
  const auto top = top_rules(g, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(g.rule(top[0]).frequency, 2u);
}

TEST(DescriptionLength, GraphFormula) {
  const auto g = two_community_fixture().graph;
  const double expected = 8 + std::log2(10.0) + 9 * std::log2(3.0) + 16 * (2 * std::log2(10.0) + std::log2(2.0));
  EXPECT_NEAR(description_length(g), expected, 1e-9);
}

TEST(DescriptionLength, RuleFormula) {
  const auto r = triangle({1, 2, 2});
  // body: 3 nodes, 2 labels, 3 pairs of multiplicity 1
  const double body = std::log2(4.0) + 3 * std::log2(3.0) + 3 * (2 * std::log2(4.0) + 1);
  const double expected = std::log2(6.0) + body + 3 * std::log2(6.0) + 0.0;
  EXPECT_NEAR(description_length(r), expected, 1e-9);
}

TEST(DescriptionLength, FixtureGrammarCompresses) {
  const auto f = two_community_fixture();
  const auto result = extract_grammar(f.graph, f.dendrogram, {3, 0});
  EXPECT_LT(inverse_compression_ratio(result.grammar, f.graph), 1.0);
}

TEST(GrammarIo, RoundTripIsLosslessAndByteStable) {
  const auto f = two_community_fixture();
  auto result = extract_grammar(f.graph, f.dendrogram, {3, 0});
  GrammarDocument doc{result.grammar, result.log, source_stats(f.graph)};
  const auto text = grammar_to_json(doc);
  const auto back = grammar_from_json(text);
  EXPECT_TRUE(back.grammar == doc.grammar);
  EXPECT_TRUE(back.log == doc.log);
  ASSERT_TRUE(back.source.has_value());
  EXPECT_TRUE(*back.source == *doc.source);
  EXPECT_EQ(grammar_to_json(back), text);
}

TEST(GrammarIo, ErrorsNameTheJsonPath) {
  const auto f = two_community_fixture();
  auto result = extract_grammar(f.graph, f.dendrogram, {3, 0});
  auto text = grammar_to_json({result.grammar, result.log, std::nullopt});
  auto j = text;
  const auto pos = j.find("\"boundary\"");
  ASSERT_NE(pos, std::string::npos);
  j.replace(pos, 10, "\"boundry\"");
  try {
    grammar_from_json(j);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("rules[0].nodes[0].boundary"), std::string::npos) << e.what();
  }
  EXPECT_THROW(grammar_from_json("{"), ValidationError);
  EXPECT_THROW(grammar_from_json(R"({"format":"other"})"), ValidationError);
}

TEST(GrammarIo, UnknownLabelIsRejected) {
  const auto f = two_community_fixture();
  auto result = extract_grammar(f.graph, f.dendrogram, {3, 0});
  auto text = grammar_to_json({result.grammar, result.log, std::nullopt});
  const auto pos = text.find("\"attr\": \"blue\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 14, "\"attr\": \"teal\"");
  EXPECT_THROW(grammar_from_json(text), ValidationError);
}
