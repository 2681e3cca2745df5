#include "swc/schemes.hpp"

#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

namespace swc {
namespace {

// A hand-built view over an explicit frontier; nothing is activated.
struct FakeView {
  explicit FakeView(int side, NodeId target, std::vector<NodeId> exposed)
      : grid(side), frontier(grid, grid.index(target)) {
    for (auto v : exposed) frontier.insert(grid.index(v));
    order.assign(grid.size(), std::numeric_limits<std::uint32_t>::max());
    DecentralizedView::Parts parts;
    parts.grid = &grid;
    parts.target = grid.index(target);
    parts.order_of = order;
    parts.exposed = &frontier;
    view.emplace(parts);
  }
  TorusGrid grid;
  Frontier frontier;
  std::vector<std::uint32_t> order;
  std::optional<DecentralizedView> view;
};

TEST(GreedySelectTest, Examples) {
  {
    FakeView f(8, {4, 4}, {{1, 1}});
    EXPECT_EQ(greedy_select(*f.view, 1), (std::vector<NodeIndex>{9}));
  }
  {
    // Distances 5 and 3 from the target.
    FakeView g(8, {4, 4}, {{1, 2}, {2, 3}});
    EXPECT_EQ(g.grid.distance(NodeId{1, 2}, NodeId{4, 4}), 5);
    EXPECT_EQ(g.grid.distance(NodeId{2, 3}, NodeId{4, 4}), 3);
    EXPECT_EQ(greedy_select(*g.view, 1), (std::vector<NodeIndex>{g.grid.index({2, 3})}));
  }
  {
    FakeView f(8, {2, 2}, {{2, 0}, {0, 2}});
    EXPECT_EQ(greedy_select(*f.view, 1), (std::vector<NodeIndex>{f.grid.index({0, 2})}));
    EXPECT_EQ(greedy_select(*f.view, 5).size(), 2u);
  }
}

TEST(GreedySelectTest, ReturnsTheMClosest) {
  FakeView f(16, {8, 8}, {{0, 0}, {8, 7}, {5, 5}, {8, 9}, {7, 8}});
  const auto chosen = greedy_select(*f.view, 3);
  ASSERT_EQ(chosen.size(), 3u);
  for (auto v : chosen) EXPECT_EQ(f.grid.distance(v, f.grid.index({8, 8})), 1);
  // Row-major tie-break among the distance-1 nodes.
  EXPECT_EQ(chosen[0], f.grid.index({7, 8}));
  EXPECT_EQ(chosen[1], f.grid.index({8, 7}));
}

TEST(GreedySelectTest, EmptyFrontierSignalsNoCandidate) {
  FakeView f(4, {2, 2}, {});
  EXPECT_THROW(greedy_select(*f.view, 1), NoCandidate);
  Rng rng(1);
  EXPECT_THROW(random_select(*f.view, 1, rng), NoCandidate);
  EXPECT_TRUE(activate_all_select(*f.view).empty());
}

TEST(RandomSelectTest, SingletonAndWholeFrontier) {
  FakeView one(8, {4, 4}, {{1, 1}});
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(random_select(*one.view, 1, rng), (std::vector<NodeIndex>{9}));
  }
  FakeView many(8, {4, 4}, {{1, 1}, {0, 5}, {7, 2}});
  const auto all = random_select(*many.view, 3, rng);
  EXPECT_EQ(all, many.frontier.sorted());
  EXPECT_EQ(random_select(*many.view, 10, rng), many.frontier.sorted());
}

TEST(RandomSelectTest, UniformOverFrontier) {
  FakeView f(8, {4, 4}, {{0, 1}, {2, 2}, {5, 0}, {7, 7}});
  Rng rng(12345);
  std::map<NodeIndex, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[random_select(*f.view, 1, rng)[0]];
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [node, c] : counts) {
    EXPECT_NEAR(static_cast<double>(c) / draws, 0.25, 0.01);
  }
}

TEST(RandomSelectTest, PairsAreDistinctAndUniform) {
  FakeView f(8, {4, 4}, {{0, 1}, {2, 2}, {5, 0}, {7, 7}});
  Rng rng(777);
  std::map<std::pair<NodeIndex, NodeIndex>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const auto s = random_select(*f.view, 2, rng);
    ASSERT_EQ(s.size(), 2u);
    ASSERT_LT(s[0], s[1]);
    ++counts[{s[0], s[1]}];
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [pair, c] : counts) {
    EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 6.0, 0.01);
  }
}

TEST(ActivateAllTest, ReturnsEverything) {
  FakeView f(8, {4, 4}, {{3, 0}, {0, 3}});
  EXPECT_EQ(activate_all_select(*f.view),
            (std::vector<NodeIndex>{f.grid.index({0, 3}), f.grid.index({3, 0})}));
}

TEST(SchemeRegistryTest, ResolvesNames) {
  for (const auto& name : scheme_names()) {
    EXPECT_EQ(make_scheme(name)->name(), name);
  }
  EXPECT_TRUE(make_scheme("random")->randomized());
  EXPECT_FALSE(make_scheme("greedy")->randomized());
  EXPECT_EQ(describe_scheme("random").kind, SchemeKind::kRandomized);
  EXPECT_THROW(make_scheme("oracle"), std::invalid_argument);
}

// Two networks that agree on the ties of every node the run activates but
// differ everywhere else must produce the same run.
TEST(DecentralizationTest, UnrevealedTiesDoNotMatter) {
  for (const char* name : {"greedy", "random"}) {
    const auto scheme = make_scheme(name);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const ModelParams params{12, 2.0, 2, 2, 2, Directedness::kDirected};
      const Graph a = generate_graph(params, seed);
      const Graph other = generate_graph(params, seed + 1000);
      RoutingSetup setup{consecutive_seeds(a.grid(), 2), default_target(a.grid()), 1, 0};

      EagerTies ta(a);
      Rng ra(seed);
      const Trace trace_a = run_routing(params, testing::shells_for(a), ta, setup, *scheme, ra);

      std::vector<NodeIndex> ties(other.drawn_ties(0).data(),
                                  other.drawn_ties(0).data() + other.weak_tie_count());
      for (const auto& r : trace_a.records) {
        const NodeIndex u = a.grid().index(r.node);
        const auto keep = a.drawn_ties(u);
        std::copy(keep.begin(), keep.end(), ties.begin() + u * 2);
      }
      const Graph b(params, seed, ties);
      EagerTies tb(b);
      Rng rb(seed);
      const Trace trace_b = run_routing(params, testing::shells_for(b), tb, setup, *scheme, rb);
      EXPECT_EQ(trace_a, trace_b) << name << " seed " << seed;
    }
  }
}

TEST(GreedySchemeTest, DeterministicOnSameView) {
  FakeView f(16, {8, 8}, {{0, 0}, {8, 7}, {5, 5}, {8, 9}, {7, 8}});
  GreedyScheme greedy;
  Rng r1(1), r2(2);
  EXPECT_EQ(greedy.select(*f.view, 2, r1), greedy.select(*f.view, 2, r2));
}

}  // namespace
}  // namespace swc
