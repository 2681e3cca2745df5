#include "swc/smallworld.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracle.hpp"

namespace swc {
namespace {

// Kahan-compensated reference for the normalizer, summed node by node.
double compensated_inverse_z(int side, double alpha) {
  double sum = 0.0, carry = 0.0;
  const TorusGrid g(side);
  for (int d = 1; d <= g.max_distance(); ++d) {
    const double term = static_cast<double>(oracle::count_at(side, d)) *
                        std::pow(static_cast<double>(d), -alpha);
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

TEST(NormalizingConstantTest, UniformCase) {
  EXPECT_DOUBLE_EQ(normalizing_constant(TorusGrid(4), 0.0), 1.0 / 15.0);
}

TEST(NormalizingConstantTest, MatchesBruteForceSum) {
  double sum = 0.0;
  for (auto v : oracle::all_cells(4)) {
    const int d = oracle::distance({0, 0}, v, 4);
    if (d > 0) sum += 1.0 / (d * d);
  }
  EXPECT_NEAR(normalizing_constant(TorusGrid(4), 2.0), 1.0 / sum, 1e-15);
}

TEST(NormalizingConstantTest, NormalizesForManySizes) {
  for (int side : {2, 3, 4, 16, 33, 128, 512}) {
    for (double alpha : {0.0, 1.0, 2.0, 3.0, 6.0}) {
      const double z = normalizing_constant(TorusGrid(side), alpha);
      EXPECT_NEAR(z * compensated_inverse_z(side, alpha), 1.0, 1e-10)
          << side << " " << alpha;
    }
  }
}

TEST(NormalizingConstantTest, InverseLogScalingAtTwo) {
  double lo = 1e300, hi = 0.0;
  for (int side = 32; side <= 1024; side *= 2) {
    const double n = static_cast<double>(side) * side;
    const double scaled = normalizing_constant(TorusGrid(side), 2.0) * std::log(n);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  EXPECT_LT(hi / lo, 3.0);
}

TEST(WeakTieSamplerTest, CdfIncrementsAreExactLaw) {
  for (int side : {2, 5, 8, 16}) {
    for (double alpha : {0.0, 1.0, 2.0, 3.0, 6.0}) {
      const WeakTieSampler sampler(TorusGrid(side), alpha);
      const auto law = oracle::endpoint_law(side, alpha, {0, 0});
      for (auto v : oracle::all_cells(side)) {
        const int d = oracle::distance({0, 0}, v, side);
        if (d == 0) continue;
        const double per_node =
            sampler.cdf_increment(d) / static_cast<double>(oracle::count_at(side, d));
        const double expected = law[v.row * side + v.col];
        EXPECT_NEAR(per_node / expected, 1.0, 1e-9);
        EXPECT_NEAR(sampler.node_probability(d) / expected, 1.0, 1e-12);
      }
      EXPECT_NEAR(sampler.cumulative().back() * sampler.z(), 1.0, 1e-12);
    }
  }
}

double total_variation(int side, double alpha, NodeId from, int draws,
                       std::uint64_t seed) {
  const WeakTieSampler sampler(TorusGrid(side), alpha);
  const TorusGrid& g = sampler.grid();
  std::vector<double> freq(g.size(), 0.0);
  Rng rng(seed);
  for (int i = 0; i < draws; ++i) freq[sampler.sample(g.index(from), rng)] += 1.0;
  const auto law = oracle::endpoint_law(side, alpha, {from.row, from.col});
  double tv = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    tv += std::abs(freq[v] / draws - law[v]);
  }
  return 0.5 * tv;
}

TEST(WeakTieSamplerTest, UniformWhenAlphaIsZero) {
  EXPECT_LT(total_variation(4, 0.0, {0, 0}, 1000000, 1), 0.005);
}

// An exact sampler sits near 0.0049 here from sampling noise alone.
TEST(WeakTieSamplerTest, MatchesExactLawAtTwo) {
  EXPECT_LT(total_variation(16, 2.0, {3, 11}, 1000000, 2), 0.0055);
}

TEST(WeakTieSamplerTest, ShellFrequenciesPassChiSquare) {
  const int side = 16;
  const int draws = 1000000;
  for (double alpha : {0.0, 1.0, 2.0, 3.0}) {
    const WeakTieSampler sampler(TorusGrid(side), alpha);
    const TorusGrid& g = sampler.grid();
    const NodeIndex u = g.index({5, 9});
    std::vector<double> observed(g.max_distance() + 1, 0.0);
    Rng rng(11);
    for (int i = 0; i < draws; ++i) observed[g.distance(u, sampler.sample(u, rng))] += 1.0;
    const auto law = oracle::endpoint_law(side, alpha, {5, 9});
    std::vector<double> expected(observed.size(), 0.0);
    for (auto v : oracle::all_cells(side)) {
      expected[oracle::distance({5, 9}, v, side)] += law[v.row * side + v.col] * draws;
    }
    double chi2 = 0.0;
    for (std::size_t d = 1; d < observed.size(); ++d) {
      chi2 += (observed[d] - expected[d]) * (observed[d] - expected[d]) / expected[d];
    }
    // 99th percentile of chi-square with 15 degrees of freedom.
    EXPECT_LT(chi2, 30.5779) << "alpha " << alpha;
  }
}

TEST(WeakTieSamplerTest, ShellOneDominatesAtSix) {
  const WeakTieSampler sampler(TorusGrid(16), 6.0);
  Rng rng(3);
  const int draws = 1000000;
  int shell_one = 0;
  const NodeIndex u = sampler.grid().index({7, 7});
  for (int i = 0; i < draws; ++i) {
    shell_one += sampler.grid().distance(u, sampler.sample(u, rng)) == 1;
  }
  const double exact = 4.0 * sampler.z();
  EXPECT_GT(exact, 0.5);
  EXPECT_NEAR(static_cast<double>(shell_one) / draws, exact, 0.005);
}

TEST(WeakTieSamplerTest, NeverReturnsSource) {
  const WeakTieSampler sampler(TorusGrid(2), 1.0);
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) EXPECT_NE(sampler.sample(3, rng), 3u);
}

TEST(GraphTest, NoWeakTiesWhenQIsZero) {
  ModelParams params{8, 2.0, 2, 0, 2, Directedness::kDirected};
  const Graph g = generate_graph(params, 5);
  EXPECT_EQ(g.weak_tie_count(), 0u);
  EXPECT_TRUE(g.weak_neighbors(0).empty());
}

TEST(GraphTest, DegreeAndDeterminism) {
  for (double alpha : {0.0, 2.0, 6.0}) {
    ModelParams params{8, alpha, 2, 2, 2, Directedness::kDirected};
    const Graph a = generate_graph(params, 11);
    const Graph b = generate_graph(params, 11);
    EXPECT_EQ(a.weak_tie_count(), 128u);
    for (NodeIndex u = 0; u < 64; ++u) {
      EXPECT_EQ(a.drawn_ties(u).size(), 2u);
      for (NodeIndex v : a.drawn_ties(u)) EXPECT_NE(u, v);
    }
    std::ostringstream sa, sb;
    write_graph(sa, a);
    write_graph(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_FALSE(generate_graph(params, 12) == a);
  }
}

TEST(GraphTest, PooledDistanceHistogramPassesChiSquare) {
  const ModelParams params{16, 2.0, 2, 2, 2, Directedness::kDirected};
  const WeakTieSampler sampler(TorusGrid(16), 2.0);
  const TorusGrid& g = sampler.grid();
  std::vector<double> observed(g.max_distance() + 1, 0.0);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Graph graph = generate_graph(params, seed, sampler);
    for (NodeIndex u = 0; u < g.size(); ++u) {
      for (NodeIndex v : graph.drawn_ties(u)) {
        observed[g.distance(u, v)] += 1.0;
        total += 1.0;
      }
    }
  }
  const double z = normalizing_constant(g, 2.0);
  double chi2 = 0.0;
  for (int d = 1; d <= g.max_distance(); ++d) {
    const double expected =
        total * static_cast<double>(g.count_at_distance(d)) * z / (d * d);
    chi2 += (observed[d] - expected) * (observed[d] - expected) / expected;
  }
  // 16 shells, 15 degrees of freedom; chi2.ppf(0.99, 15).
  EXPECT_LT(chi2, 30.5779);
}

TEST(GraphTest, UndirectedIncidenceListsBothEndpoints) {
  ModelParams params{6, 1.0, 1, 3, 1, Directedness::kUndirected};
  const Graph g = generate_graph(params, 21);
  std::size_t incident_total = 0;
  for (NodeIndex u = 0; u < 36; ++u) {
    incident_total += g.weak_neighbors(u).size();
    for (NodeIndex v : g.drawn_ties(u)) {
      const auto nv = g.weak_neighbors(v);
      EXPECT_NE(std::find(nv.begin(), nv.end(), u), nv.end());
    }
  }
  EXPECT_EQ(incident_total, 2 * g.weak_tie_count());
}

TEST(LazyGraphTest, RevealCachesAndMatchesEagerDraws) {
  const ModelParams params{8, 2.0, 2, 2, 2, Directedness::kDirected};
  auto sampler = std::make_shared<const WeakTieSampler>(TorusGrid(8), 2.0);
  LazyGraph lazy(params, 77, sampler);
  const Graph eager = generate_graph(params, 77, *sampler);
  const auto first = lazy.reveal(9);
  const std::vector<NodeIndex> copy(first.begin(), first.end());
  const auto second = lazy.reveal(9);
  EXPECT_EQ(copy, std::vector<NodeIndex>(second.begin(), second.end()));
  EXPECT_EQ(lazy.revealed_count(), 1u);
  // Reveal the rest in reverse order; per-node streams make order irrelevant.
  for (NodeIndex u = 64; u-- > 0;) {
    const auto ties = lazy.reveal(u);
    const auto expected = eager.drawn_ties(u);
    EXPECT_TRUE(std::equal(ties.begin(), ties.end(), expected.begin(), expected.end()));
  }
  EXPECT_EQ(lazy.revealed_count(), 64u);
}

TEST(LazyGraphTest, EmptyWhenQIsZeroAndDirectedOnly) {
  auto sampler = std::make_shared<const WeakTieSampler>(TorusGrid(4), 2.0);
  LazyGraph lazy(ModelParams{4, 2.0, 1, 0, 1, Directedness::kDirected}, 1, sampler);
  EXPECT_TRUE(lazy.reveal(3).empty());
  EXPECT_THROW(LazyGraph(ModelParams{4, 2.0, 1, 1, 1, Directedness::kUndirected}, 1,
                         sampler),
               std::invalid_argument);
}

TEST(GraphIoTest, RoundTripIsBitExact) {
  for (double alpha : {0.0, 0.1, 2.0, 2.3456789012345678, 6.0}) {
    for (auto dir : {Directedness::kDirected, Directedness::kUndirected}) {
      const ModelParams params{5, alpha, 2, 3, 2, dir};
      const Graph g = generate_graph(params, 0xfeedbeefcafeULL);
      std::ostringstream first;
      write_graph(first, g);
      std::istringstream in(first.str());
      const Graph back = read_graph(in);
      EXPECT_TRUE(back == g);
      EXPECT_EQ(back.params().alpha, alpha);
      std::ostringstream second;
      write_graph(second, back);
      EXPECT_EQ(first.str(), second.str());
    }
  }
}

TEST(GraphIoTest, HeaderFormat) {
  const Graph g = generate_graph(ModelParams{2, 2.0, 1, 1, 1, Directedness::kDirected}, 9);
  std::ostringstream out;
  write_graph(out, g);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "2 2 1 1 1 directed 9");
}

TEST(GraphIoTest, RejectsMalformedInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_graph(in);
  };
  EXPECT_THROW(parse(""), std::runtime_error);
  EXPECT_THROW(parse("2 2 1 1 1 sideways 9\n"), std::runtime_error);
  EXPECT_THROW(parse("2 2 1 1 1 directed 9\n0 0 0 1\n"), std::runtime_error);
  EXPECT_THROW(parse("2 x 1 1 1 directed 9\n"), std::runtime_error);
  // Self-loop.
  EXPECT_THROW(parse("2 2 1 1 1 directed 9\n0 0 0 0\n0 1 0 0\n1 0 0 0\n1 1 0 0\n"),
               std::runtime_error);
  EXPECT_NO_THROW(parse("2 2 1 1 1 directed 9\n0 0 0 1\n0 1 0 0\n1 0 0 0\n1 1 0 0\n"));
}

TEST(ModelParamsTest, Validation) {
  EXPECT_THROW((ModelParams{1, 2.0, 1, 1, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ModelParams{4, -1.0, 1, 1, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ModelParams{4, 2.0, 0, 1, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ModelParams{4, 2.0, 1, -1, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((ModelParams{4, 2.0, 1, 1, 0}).validate(), std::invalid_argument);
  EXPECT_TRUE((ModelParams{4, 2.0, 2, 2, 2}).canonical());
  EXPECT_FALSE((ModelParams{4, 2.0, 1, 2, 2}).canonical());
}

}  // namespace
}  // namespace swc
