#include <gtest/gtest.h>

#include <algorithm>

#include "avrg/error.hpp"
#include "avrg/statistics.hpp"
#include "avrg/synthetic.hpp"

using namespace avrg;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

} // namespace

TEST(Cabam, SizeAndConnectivity) {
  const auto g = cabam_generate({300, 3, 3, 0.7, 2});
  EXPECT_EQ(g.node_count(), 300u);
  EXPECT_EQ(g.edge_count(), 3u * (300 - 3) + 3);
  EXPECT_EQ(connected_components(g).size(), 1u);
  EXPECT_EQ(g.edge_pair_count(), g.edge_count()); // simple graph
}

TEST(Cabam, ValidatesConfig) {
  EXPECT_THROW(cabam_generate({3, 3, 2, 0.5, 0}), ValidationError);
  EXPECT_THROW(cabam_generate({10, 0, 2, 0.5, 0}), ValidationError);
  EXPECT_THROW(cabam_generate({10, 2, 1, 0.5, 0}), ValidationError);
  EXPECT_THROW(cabam_generate({10, 2, 2, 1.5, 0}), ValidationError);
}

TEST(Cabam, FullHomophilyKeepsEdgesInsideClasses) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = cabam_generate({200, 2, 2, 1.0, seed});
    std::uint64_t cross = 0;
    g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
      if (u >= 2 || v >= 2) // beyond the seed clique
        cross += k * (g.node(u).attr != g.node(v).attr);
    });
    // A newcomer only crosses when its class has fewer than m members.
    EXPECT_LE(cross, 2u);
    EXPECT_GT(*attribute_assortativity(g), 0.9);
  }
}

TEST(Cabam, NeutralPreferenceIsNearZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    EXPECT_LE(std::abs(*attribute_assortativity(cabam_generate({500, 2, 2, 0.5, seed}))), 0.08) << seed;
}

TEST(Cabam, ZeroPreferenceIsStronglyDisassortative) {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    EXPECT_LT(*attribute_assortativity(cabam_generate({500, 2, 2, 0.0, seed})), -0.3) << seed;
}

TEST(Cabam, AssortativityIsMonotoneInPreference) {
  double previous = -2.0;
  for (double pc : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      values.push_back(*attribute_assortativity(cabam_generate({500, 2, 2, pc, seed})));
    const double m = median(values);
    EXPECT_GE(m, previous) << pc;
    previous = m;
  }
}

TEST(Cabam, Deterministic) {
  EXPECT_TRUE(cabam_generate({100, 2, 2, 0.3, 8}) == cabam_generate({100, 2, 2, 0.3, 8}));
}
