#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "cuttree/cut_tree.hpp"
#include "cuttree/destruction.hpp"
#include "cuttree/generators.hpp"
#include "fixtures.hpp"
#include "oracles/oracles.hpp"

using namespace cuttree;

namespace {

oracle::Block leaves_below(const CutTree& ct, Node x) {
  if (ct.is_leaf(x)) return {x};
  auto a = leaves_below(ct, ct.left(x));
  const auto b = leaves_below(ct, ct.right(x));
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

std::map<oracle::Block, std::pair<oracle::Block, oracle::Block>> splits_of(const CutTree& ct) {
  std::map<oracle::Block, std::pair<oracle::Block, oracle::Block>> out;
  for (Node x = Node(ct.leaf_count() + 1); x <= ct.root(); ++x) {
    auto a = leaves_below(ct, ct.left(x));
    auto b = leaves_below(ct, ct.right(x));
    if (b < a) std::swap(a, b);
    out[leaves_below(ct, x)] = {a, b};
  }
  return out;
}

std::uint32_t naive_depth_of_lca(const CutTree& ct, Vertex i, Vertex j) {
  std::vector<Node> up;
  for (Node x = i; x != 0; x = ct.parent(x)) up.push_back(x);
  for (Node y = j; y != 0; y = ct.parent(y)) {
    if (std::find(up.begin(), up.end(), y) != up.end()) return ct.depth(y);
  }
  return 0;
}

}  // namespace

TEST(CutTree, ElevenVertexGolden) {
  const RootedTree t = fixtures::eleven_tree();
  const CutTree ct(t, fixtures::eleven_schedule());
  EXPECT_EQ(ct.newick(), fixtures::eleven_newick());
  EXPECT_EQ(ct.leaf_count(), 11U);
  EXPECT_EQ(ct.node_count(), 21U);

  const Node root = ct.root();
  auto a = leaves_below(ct, ct.left(root));
  auto b = leaves_below(ct, ct.right(root));
  if (b < a) std::swap(a, b);
  EXPECT_EQ(a, (oracle::Block{1, 3, 4, 5, 9, 11}));
  EXPECT_EQ(b, (oracle::Block{2, 6, 7, 8, 10}));

  const auto splits = splits_of(ct);
  const auto& s159 = splits.at({1, 5, 9});
  EXPECT_EQ(s159.first, (oracle::Block{1, 5}));
  EXPECT_EQ(s159.second, (oracle::Block{9}));

  EXPECT_EQ(ct.leaf_depth(1), 4U);
  EXPECT_EQ(ct.leaf_depth(9), 3U);
  EXPECT_EQ(ct.pairwise_distance(1, 5), 2U);
  EXPECT_EQ(ct.pairwise_distance(4, 10), 6U);
  EXPECT_EQ(ct.pairwise_distance(7, 7), 0U);
  const std::vector<Vertex> targets{4, 10};
  EXPECT_EQ(ct.reduced_length(targets), 6U);
  EXPECT_EQ(ct.isolation_cuts(targets), 5U);
  EXPECT_EQ(multi_isolation(t, fixtures::eleven_schedule(), targets).Z, 5U);
  EXPECT_THROW((void)ct.leaf_depth(12), std::out_of_range);
}

TEST(CutTree, SmallCases) {
  const RootedTree one({0, 0}, "single");
  const CutTree c1(one, CutSchedule::from_order(1, {}));
  EXPECT_EQ(c1.node_count(), 1U);
  EXPECT_EQ(c1.root(), 1U);
  EXPECT_EQ(c1.leaf_depth(1), 0U);
  EXPECT_EQ(c1.newick(), "1;");

  const RootedTree two({0, 0, 1}, "edge");
  const std::vector<Vertex> order{2};
  const CutTree c2(two, CutSchedule::from_order(2, order));
  EXPECT_EQ(c2.leaf_depth(1), 1U);
  EXPECT_EQ(c2.leaf_depth(2), 1U);
  EXPECT_EQ(c2.pairwise_distance(1, 2), 2U);
  EXPECT_EQ(c2.newick(), "(1,2);");
}

// Every tree on n <= 6 vertices (up to relabeling) and every cut order.
TEST(CutTree, ExhaustiveAgainstForwardSplitting) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (const RootedTree& t : oracle::recursive_trees(n)) {
      std::vector<Vertex> order(n - 1);
      std::iota(order.begin(), order.end(), Vertex{2});
      do {
        const CutSchedule s = CutSchedule::from_order(n, order);
        const CutTree ct(t, s);
        const auto run = oracle::forward_split(t, order);
        ASSERT_EQ(splits_of(ct), run.splits);
        for (Vertex u = 1; u <= n; ++u) ASSERT_EQ(ct.leaf_depth(u), run.depth[u]);
        for (Vertex i = 1; i <= n; ++i) {
          for (Vertex j = 1; j <= n; ++j) {
            ASSERT_EQ(ct.lca(i, j), ct.lca_walk(i, j));
            const std::vector<Vertex> pair{i, j};
            const auto both = oracle::forward_spread(t, order, pair);
            if (i != j) {
              // cuts until i and j separate, the separating one included
              const std::uint64_t first_sep = naive_depth_of_lca(ct, i, j) + 1;
              ASSERT_EQ(ct.pairwise_distance(i, j), (both.Z + 1) - (first_sep - 1));
            }
          }
        }
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
}

TEST(CutTree, ReducedLengthIdentityOnRandomTrees) {
  Stream rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(99);
    const RootedTree t = gen_urt(n, rng);
    const CutSchedule s = sample_order(t, rng);
    const CutTree ct(t, s);
    const std::size_t j = 1 + rng.below(std::min<std::size_t>(n, 6));
    std::vector<Vertex> leaves(n);
    std::iota(leaves.begin(), leaves.end(), Vertex{1});
    rng.shuffle(std::span<Vertex>(leaves));
    leaves.resize(j);
    const auto oracle_counts =
        oracle::forward_spread(t, {s.order().begin(), s.order().end()}, leaves);
    ASSERT_EQ(ct.reduced_length(leaves) - (j - 1), oracle_counts.Z);
    ASSERT_EQ(ct.isolation_cuts(leaves), oracle_counts.Z);
    ASSERT_EQ(ct.spread_cuts(leaves), oracle_counts.W);
    ASSERT_EQ(multi_isolation(t, s, leaves).Z, oracle_counts.Z);
    ASSERT_EQ(multi_isolation(t, s, leaves).W, oracle_counts.W);
    const Vertex u = leaves[0];
    const std::vector<Vertex> single{u};
    ASSERT_EQ(multi_isolation(t, s, single).Z, ct.leaf_depth(u));
  }
}

TEST(CutTree, LargeTargetSetsUseMarking) {
  Stream rng(5);
  const RootedTree t = gen_urt(400, rng);
  const CutSchedule s = sample_order(t, rng);
  const CutTree ct(t, s);
  std::vector<Vertex> leaves(60);
  std::iota(leaves.begin(), leaves.end(), Vertex{100});
  const auto o = oracle::forward_spread(t, {s.order().begin(), s.order().end()}, leaves);
  EXPECT_EQ(ct.isolation_cuts(leaves), o.Z);
  EXPECT_EQ(ct.spread_cuts(leaves), o.W);

  std::vector<Vertex> all(400);
  std::iota(all.begin(), all.end(), Vertex{1});
  EXPECT_EQ(ct.isolation_cuts(all), 399U);
  EXPECT_EQ(multi_isolation(t, s, all).Z, 399U);
  EXPECT_THROW((void)ct.reduced_length(std::vector<Vertex>{}), std::invalid_argument);
}

TEST(CutTree, DistanceMatrixIsATreeMetric) {
  Stream rng(3);
  const RootedTree t = gen_bst(2000, rng);
  const CutTree ct(t, sample_order(t, rng));
  for (int rep = 0; rep < 1000; ++rep) {
    const DistanceMatrix m = ct.sample_distance_matrix(4, rng);
    ASSERT_EQ(m.dim, 5U);
    for (std::size_t i = 0; i < 5; ++i) {
      ASSERT_EQ(m.at(i, i), 0.0);
      for (std::size_t j = 0; j < 5; ++j) {
        ASSERT_EQ(m.at(i, j), m.at(j, i));
        for (std::size_t k = 0; k < 5; ++k) ASSERT_LE(m.at(i, k), m.at(i, j) + m.at(j, k));
      }
    }
    for (std::size_t a = 1; a < 5; ++a) ASSERT_EQ(m.at(0, a), ct.leaf_depth(m.points[a]));
    // four-point condition
    const double s1 = m.at(0, 1) + m.at(2, 3);
    const double s2 = m.at(0, 2) + m.at(1, 3);
    const double s3 = m.at(0, 3) + m.at(1, 2);
    std::array<double, 3> sums{s1, s2, s3};
    std::sort(sums.begin(), sums.end());
    ASSERT_EQ(sums[1], sums[2]);
  }
  const DistanceMatrix one = ct.sample_distance_matrix(1, rng);
  EXPECT_EQ(one.at(0, 1), ct.leaf_depth(one.points[1]));
  EXPECT_THROW((void)ct.sample_distance_matrix(0, rng), std::invalid_argument);
}

TEST(CutTree, NewickWriterMatchesMember) {
  const CutTree ct(fixtures::eleven_tree(), fixtures::eleven_schedule());
  std::ostringstream os;
  write_newick(os, ct);
  EXPECT_EQ(os.str(), std::string(fixtures::eleven_newick()) + "\n");
}
