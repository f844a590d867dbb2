#include <gtest/gtest.h>

#include <sstream>

#include "avrg/error.hpp"
#include "avrg/graph.hpp"
#include "avrg/graph_io.hpp"
#include "avrg/statistics.hpp"
#include "avrg/synthetic.hpp"
#include "support.hpp"

using namespace avrg;
using namespace avrg::testing;

namespace {

NodeId id_of(const AttributedGraph &g, const std::string &name) { return g.name_index().at(name); }

AttributedGraph two_cliques(std::size_t k) {
  AttributedGraph g({"blue", "pink"});
  for (std::size_t i = 0; i < 2 * k; ++i)
    g.add_node(NodeData::terminal(i < k ? 0 : 1));
  for (NodeId u = 0; u < 2 * k; ++u)
    for (NodeId v = u + 1; v < 2 * k; ++v)
      if ((u < k) == (v < k))
        g.add_edge(u, v);
  return g;
}

AttributedGraph complete_bipartite(std::size_t a, std::size_t b) {
  AttributedGraph g({"blue", "pink"});
  for (std::size_t i = 0; i < a + b; ++i)
    g.add_node(NodeData::terminal(i < a ? 0 : 1));
  for (NodeId u = 0; u < a; ++u)
    for (NodeId v = static_cast<NodeId>(a); v < a + b; ++v)
      g.add_edge(u, v);
  return g;
}

} // namespace

TEST(Graph, MultiplicityCountsTowardDegreeAndEdges) {
  AttributedGraph g({"x"});
  const auto a = g.add_node(NodeData::terminal(0));
  const auto b = g.add_node(NodeData::terminal(0));
  g.add_edge(a, b);
  g.add_edge(b, a, 2);
  EXPECT_EQ(g.multiplicity(a, b), 3u);
  EXPECT_EQ(g.degree(a), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.edge_pair_count(), 1u);
  g.remove_edge(a, b);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.degree(b), 0u);
}

TEST(Graph, RejectsSelfLoops) {
  AttributedGraph g({"x"});
  const auto a = g.add_node(NodeData::terminal(0));
  EXPECT_THROW(g.add_edge(a, a), Error);
}

TEST(Graph, RemoveNodeDropsIncidentEdges) {
  auto g = two_community_fixture().graph;
  const auto c = id_of(g, "c");
  const auto deg = g.degree(c);
  const auto m = g.edge_count();
  g.remove_node(c);
  EXPECT_EQ(g.edge_count(), m - deg);
  EXPECT_FALSE(g.has_node(c));
  EXPECT_EQ(g.node_count(), 8u);
}

TEST(Graph, InducedSubgraphKeepsIdsAndInternalEdges) {
  const auto g = two_community_fixture().graph;
  const std::vector<NodeId> cde{id_of(g, "c"), id_of(g, "d"), id_of(g, "e")};
  const auto sub = induced_subgraph(g, cde);
  EXPECT_EQ(sub.node_count(), 3u);
  EXPECT_EQ(sub.edge_count(), 3u);
  EXPECT_EQ(sub.node(cde[0]).name, "c");
}

TEST(Graph, FixtureBoundaryOfCDE) {
  const auto g = two_community_fixture().graph;
  const std::vector<NodeId> cde{id_of(g, "c"), id_of(g, "d"), id_of(g, "e")};
  const auto cut = boundary_edges(g, cde);
  EXPECT_EQ(cut.cut_edges.size(), 5u);
  EXPECT_EQ(cut.boundary_degree.at(id_of(g, "c")), 2u);
  EXPECT_EQ(cut.boundary_degree.at(id_of(g, "d")), 1u);
  EXPECT_EQ(cut.boundary_degree.at(id_of(g, "e")), 2u);
}

TEST(Graph, FixtureHasTwoColorClustersJoinedByTwoEdges) {
  const auto g = two_community_fixture().graph;
  EXPECT_EQ(g.node_count(), 9u);
  EXPECT_EQ(g.edge_count(), 16u);
  std::size_t cross = 0;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) { cross += k * (g.node(u).attr != g.node(v).attr); });
  EXPECT_EQ(cross, 2u);
  EXPECT_EQ(g.multiplicity(id_of(g, "c"), id_of(g, "h")), 1u);
  EXPECT_EQ(g.multiplicity(id_of(g, "b"), id_of(g, "f")), 1u);
}

TEST(Graph, ConnectedComponentsOrderedBySmallestMember) {
  AttributedGraph g({"x"});
  for (int i = 0; i < 5; ++i)
    g.add_node(NodeData::terminal(0));
  g.add_edge(3, 4);
  g.add_edge(0, 2);
  const auto cc = connected_components(g);
  ASSERT_EQ(cc.size(), 3u);
  EXPECT_EQ(cc[0], (std::vector<NodeId>{0, 2}));
  EXPECT_EQ(cc[1], (std::vector<NodeId>{1}));
  EXPECT_EQ(cc[2], (std::vector<NodeId>{3, 4}));
}

TEST(GraphIo, RoundTripPreservesMultiplicityAndLabels) {
  Rng rng(3);
  const auto g = random_test_graph(rng, 20, 3, true);
  std::stringstream edges, attrs;
  write_edge_list(g, edges);
  write_attributes(g, attrs);
  const auto back = load_graph(edges, attrs);
  EXPECT_TRUE(same_named_graph(g, back));
}

TEST(GraphIo, AnonymousNodesSurviveRoundTrip) {
  AttributedGraph g({"x", "y"});
  const auto a = g.add_node(NodeData::terminal(0));
  const auto b = g.add_node(NodeData::terminal(1));
  g.add_edge(a, b, 2);
  std::stringstream edges, attrs;
  write_edge_list(g, edges);
  write_attributes(g, attrs);
  const auto back = load_graph(edges, attrs);
  EXPECT_EQ(back.node_count(), 2u);
  EXPECT_EQ(back.edge_count(), 2u);
}

TEST(GraphIo, MissingAttributeNamesTheNode) {
  std::stringstream edges("a\tb\n"), attrs("a\tred\n");
  try {
    load_graph(edges, attrs);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(GraphIo, SelfLoopsAreDroppedAndCounted) {
  std::stringstream edges("# comment\na\ta\na\tb\n"), attrs("a\tred\nb\tblue\n");
  LoadReport report;
  const auto g = load_graph(edges, attrs, &report);
  EXPECT_EQ(report.self_loops_dropped, 1u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.alphabet(), (std::vector<std::string>{"blue", "red"}));
}

TEST(GraphIo, MalformedLineReportsLineNumber) {
  std::stringstream edges("a\tb\nc\n"), attrs("a\tx\nb\tx\nc\tx\n");
  try {
    load_graph(edges, attrs);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Statistics, HomophilousTwoCliquesHaveAttributeAssortativityOne) {
  const auto g = two_cliques(4);
  EXPECT_EQ(attribute_assortativity(g), 1.0);
  EXPECT_FALSE(degree_assortativity(g).has_value()); // regular graph
}

TEST(Statistics, CompleteBipartiteIsFullyDisassortative) {
  const auto g = complete_bipartite(2, 3);
  EXPECT_EQ(attribute_assortativity(g), -1.0);
  ASSERT_TRUE(degree_assortativity(g).has_value());
  EXPECT_NEAR(*degree_assortativity(g), -1.0, 1e-12);
}

TEST(Statistics, MixingMatrixOfFixture) {
  const auto m = mixing_matrix(two_community_fixture().graph);
  // 8 blue-blue, 6 pink-pink, 2 cross edges out of 16.
  EXPECT_DOUBLE_EQ(m.at(0, 0), 8.0 / 16);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 6.0 / 16);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 1.0 / 16);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 1.0 / 16);
}

TEST(Statistics, MixingMatrixIgnoresNonterminalEdges) {
  AttributedGraph g({"x", "y"});
  const auto a = g.add_node(NodeData::terminal(0));
  const auto b = g.add_node(NodeData::terminal(1));
  const auto x = g.add_node(NodeData::nonterminal(2));
  g.add_edge(a, b);
  g.add_edge(a, x);
  g.add_edge(b, x);
  const auto m = mixing_matrix(g);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.0);
}

TEST(Statistics, AssortativityMatchesOraclesOnRandomGraphs) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_test_graph(rng, 30, 2 + rng.uniform_index(3), trial % 2 == 0);
    const auto d = degree_assortativity(g), d_oracle = degree_assortativity_oracle(g);
    ASSERT_EQ(d.has_value(), d_oracle.has_value()) << trial;
    if (d) {
      EXPECT_NEAR(*d, *d_oracle, 1e-9) << trial;
    }
    const auto a = attribute_assortativity(g), a_oracle = attribute_assortativity_oracle(g);
    ASSERT_EQ(a.has_value(), a_oracle.has_value()) << trial;
    if (a) {
      EXPECT_NEAR(*a, *a_oracle, 1e-9) << trial;
    }
  }
}

TEST(Statistics, AssortativityIsInvariantUnderRelabeling) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_test_graph(rng, 25, 3);
    auto ids = g.node_ids();
    rng.shuffle(ids);
    AttributedGraph h(g.alphabet());
    std::map<NodeId, NodeId> to;
    for (NodeId id : ids)
      to[id] = h.add_node(g.node(id));
    for (const auto &e : g.edges())
      h.add_edge(to[e.u], to[e.v], e.multiplicity);
    EXPECT_EQ(degree_assortativity(g).has_value(), degree_assortativity(h).has_value());
    if (degree_assortativity(g)) {
      EXPECT_NEAR(*degree_assortativity(g), *degree_assortativity(h), 1e-12);
    }
    if (attribute_assortativity(g)) {
      EXPECT_NEAR(*attribute_assortativity(g), *attribute_assortativity(h), 1e-12);
    }
  }
}
