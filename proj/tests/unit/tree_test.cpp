#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "rsif/synth.hpp"
#include "rsif/tree.hpp"

using namespace rsif;

namespace {

Dataset numeric_dataset(const std::vector<double>& xs, const std::string& id = "x") {
    Dataset d;
    d.n = xs.size();
    FeatureColumn c{id, id, FeatureKind::numeric, {}};
    for (double x : xs) c.values.push_back(RealVector{{x}});
    d.columns.push_back(std::move(c));
    return d;
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

/// Sends every row of `rows` down the tree and counts arrivals per leaf.
std::vector<std::size_t> replay_leaf_sizes(const RSITree& tree, const Dataset& d, std::span<const std::size_t> rows,
                                           std::span<const CategoricalStats> stats = {}) {
    std::vector<std::size_t> counts(tree.nodes.size(), 0);
    for (std::size_t i : rows) ++counts[leaf_index(tree, RowView(d, i), stats)];
    return counts;
}

}  // namespace

TEST(AvgPathC, KnownValues) {
    EXPECT_EQ(avg_path_c(0), 0.0);
    EXPECT_EQ(avg_path_c(1), 0.0);
    EXPECT_EQ(avg_path_c(2), 1.0);
    EXPECT_NEAR(avg_path_c(256), 10.2448, 1e-4);
}

TEST(MaxDepth, CeilLog2) {
    EXPECT_EQ(max_depth_for(1), 0u);
    EXPECT_EQ(max_depth_for(2), 1u);
    EXPECT_EQ(max_depth_for(4), 2u);
    EXPECT_EQ(max_depth_for(5), 3u);
    EXPECT_EQ(max_depth_for(256), 8u);
}

TEST(RandomThreshold, StrictlyInsideRange) {
    std::vector<double> p{0.0, 10.0};
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        auto t = random_threshold(p, rng);
        ASSERT_TRUE(t);
        EXPECT_GT(*t, 0.0);
        EXPECT_LT(*t, 10.0);
    }
}

TEST(RandomThreshold, ConstantProjectionHasNoThreshold) {
    std::vector<double> p{4.0, 4.0, 4.0};
    Rng rng(0);
    EXPECT_FALSE(random_threshold(p, rng));
    EXPECT_FALSE(random_threshold(std::vector<double>{}, rng));
}

TEST(RandomThreshold, AdjacentDoublesHaveNoThreshold) {
    Rng rng(0);
    double a = 0.3;
    EXPECT_FALSE(random_threshold(std::vector<double>{a, std::nextafter(a, 1.0), a}, rng));
    double b = std::nextafter(std::nextafter(a, 1.0), 1.0);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(random_threshold(std::vector<double>{a, b}, rng), std::nextafter(a, 1.0));
}

TEST(RandomThreshold, UniformOnUnitInterval) {
    std::vector<double> p{0.0, 1.0};
    Rng rng(11);
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += *random_threshold(p, rng);
    EXPECT_NEAR(sum / draws, 0.5, 0.02);
}

TEST(TreeBuilder, SingleRowIsLeaf) {
    Dataset d = numeric_dataset({1.0, 2.0, 3.0});
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}}, iota(3), SelectionStrategy::two_step);
    Rng rng(0);
    std::vector<std::size_t> one{1};
    RSITree tree = b.build(one, 3, rng);
    ASSERT_EQ(tree.nodes.size(), 1u);
    EXPECT_TRUE(tree.nodes[0].is_leaf());
    EXPECT_EQ(tree.nodes[0].size, 1u);
    EXPECT_EQ(tree.nodes[0].depth, 0u);
}

TEST(TreeBuilder, ConstantDataIsRootLeaf) {
    Dataset d = numeric_dataset(std::vector<double>(20, 5.0));
    for (DistanceId id : {DistanceId::euclidean, DistanceId::identity}) {
        TreeBuilder b(d, {{0, {id}}}, iota(20), SelectionStrategy::two_step);
        Rng rng(1);
        auto rows = iota(20);
        RSITree tree = b.build(rows, 5, rng);
        ASSERT_EQ(tree.nodes.size(), 1u);
        EXPECT_EQ(tree.nodes[0].size, 20u);
    }
}

TEST(TreeBuilder, UsableChoicesSingleFeature) {
    Dataset d = numeric_dataset({1.0, 2.0, 3.0});
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}}, iota(3), SelectionStrategy::two_step);
    Rng rng(0);
    auto rows = iota(3);
    auto c = b.usable_choices(rows, rng);
    ASSERT_TRUE(c);
    EXPECT_EQ(*c, (std::pair<std::size_t, std::size_t>(0, 0)));
}

TEST(TreeBuilder, NoUsableChoiceWhenEveryFeatureConstant) {
    Dataset d = numeric_dataset({2.0, 2.0, 2.0});
    d.columns.push_back({"c", "c", FeatureKind::categorical, {Category{"a"}, Category{"a"}, Category{"a"}}});
    auto stats = std::vector<CategoricalStats>{CategoricalStats{}, fit_categorical_stats(d.columns[1])};
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}, {1, {DistanceId::goodall3, DistanceId::of}}}, iota(3),
                  SelectionStrategy::two_step, stats);
    Rng rng(0);
    auto rows = iota(3);
    EXPECT_FALSE(b.usable_choices(rows, rng));
}

TEST(TreeBuilder, UsableFeaturesDrawnUniformly) {
    Dataset d = numeric_dataset({1.0, 2.0, 3.0, 4.0});
    d.columns.push_back({"y", "y", FeatureKind::numeric, {}});
    for (double y : {5.0, 6.0, 7.0, 8.0}) d.columns[1].values.push_back(RealVector{{y}});
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}, {1, {DistanceId::manhattan}}}, iota(4), SelectionStrategy::two_step);
    Rng rng(5);
    auto rows = iota(4);
    int first = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) first += b.usable_choices(rows, rng)->first == 0 ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(first) / draws, 0.5, 0.02);
}

TEST(TreeBuilder, ConstantFeatureNeverChosen) {
    Dataset d = numeric_dataset({1.0, 2.0, 3.0, 4.0});
    d.columns.push_back({"k", "k", FeatureKind::numeric, {}});
    for (int i = 0; i < 4; ++i) d.columns[1].values.push_back(RealVector{{9.0}});
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}, {1, {DistanceId::euclidean}}}, iota(4), SelectionStrategy::two_step);
    Rng rng(5);
    auto rows = iota(4);
    for (int i = 0; i < 500; ++i) EXPECT_EQ(b.usable_choices(rows, rng)->first, 0u);
}

TEST(TreeBuilder, PsiFourRespectsDepthAndSizes) {
    Dataset d = numeric_dataset({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0});
    TreeBuilder b(d, {{0, {DistanceId::euclidean}}}, iota(8), SelectionStrategy::two_step);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        auto sub = sample_without_replacement(rng, 8, 4);
        RSITree tree = b.build(sub, max_depth_for(4), rng);
        EXPECT_LE(tree_depth(tree), 2u);
        std::size_t total = 0;
        for (const auto& n : tree.nodes) {
            if (n.is_leaf()) total += n.size;
        }
        EXPECT_EQ(total, 4u);
    }
}

TEST(PathLength, SingleLeafIsZero) {
    RSITree tree;
    tree.nodes.push_back(TreeNode{1, 0, std::nullopt, 0, 0});
    Dataset d = numeric_dataset({1.0});
    EXPECT_EQ(path_length(tree, RowView(d, 0)), 0.0);
}

TEST(PathLength, DepthPlusAdjustment) {
    // Root splits on identity at 0.5, right child on identity at 1.5; the leaf
    // for x = 2 sits at depth 2 and held 4 training rows.
    RSITree tree;
    Split s0{0, DistanceId::identity, std::nullopt, 0.5};
    Split s1{0, DistanceId::identity, std::nullopt, 1.5};
    tree.nodes.push_back(TreeNode{6, 0, s0, 1, 2});
    tree.nodes.push_back(TreeNode{1, 1, std::nullopt, 0, 0});
    tree.nodes.push_back(TreeNode{5, 1, s1, 3, 4});
    tree.nodes.push_back(TreeNode{1, 2, std::nullopt, 0, 0});
    tree.nodes.push_back(TreeNode{4, 2, std::nullopt, 0, 0});
    Dataset d = numeric_dataset({2.0});
    EXPECT_DOUBLE_EQ(path_length(tree, RowView(d, 0)), 2.0 + avg_path_c(4));
}

namespace {

struct MultimodalSetup {
    Dataset data = synth_multimodal(300, 0.05, 4);
    std::vector<CategoricalStats> stats;
    std::vector<std::size_t> pool;

    MultimodalSetup() {
        stats.resize(data.columns.size());
        stats[1] = fit_categorical_stats(data.columns[1]);
        Rng rng(8);
        pool = sample_without_replacement(rng, data.n, 150);
    }

    std::vector<FeatureDistances> features() const {
        return {{0, {DistanceId::euclidean, DistanceId::identity}},
                {1, {DistanceId::of, DistanceId::goodall3, DistanceId::lin}},
                {2, {DistanceId::dtw}}};
    }
};

}  // namespace

TEST(TreeProperties, ReplayReproducesLeafSizesForEveryStrategy) {
    MultimodalSetup s;
    for (auto strategy :
         {SelectionStrategy::two_step, SelectionStrategy::random, SelectionStrategy::local, SelectionStrategy::global}) {
        TreeBuilder b(s.data, s.features(), s.pool, strategy, s.stats);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Rng rng(seed);
            auto sub = sample_without_replacement(rng, s.data.n, 64);
            RSITree tree = b.build(sub, max_depth_for(64), rng);
            auto counts = replay_leaf_sizes(tree, s.data, sub, s.stats);
            for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
                const auto& node = tree.nodes[k];
                EXPECT_GE(node.size, 1u) << "empty node";
                EXPECT_LE(node.depth, tree.max_depth);
                if (node.is_leaf()) {
                    EXPECT_EQ(counts[k], node.size) << to_string(strategy);
                } else {
                    EXPECT_EQ(tree.nodes[node.left].size + tree.nodes[node.right].size, node.size);
                    EXPECT_GE(tree.nodes[node.left].size, 1u);
                    EXPECT_GE(tree.nodes[node.right].size, 1u);
                }
            }
        }
    }
}

TEST(TreeProperties, BuildIsBitReproducible) {
    MultimodalSetup s;
    TreeBuilder b(s.data, s.features(), s.pool, SelectionStrategy::two_step, s.stats);
    auto build = [&](std::uint64_t seed) {
        Rng rng = make_stream(seed, 0);
        auto sub = sample_without_replacement(rng, s.data.n, 128);
        return b.build(sub, max_depth_for(128), rng);
    };
    EXPECT_EQ(build(21), build(21));
    EXPECT_NE(build(21), build(22));
}

TEST(TreeProperties, FullDepthSeparatesDistinctValues) {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> xs(2 + gen() % 20);
        for (double& x : xs) x = static_cast<double>(gen() % 1000);
        Dataset d = numeric_dataset(xs);
        TreeBuilder b(d, {{0, {DistanceId::euclidean, DistanceId::identity}}}, iota(xs.size()),
                      SelectionStrategy::two_step);
        Rng rng(trial);
        auto rows = iota(xs.size());
        RSITree tree = b.build(rows, 64, rng);
        // In one dimension neither projection can produce a degenerate split, so
        // a multi-row leaf above the depth limit holds a single repeated value.
        auto counts = replay_leaf_sizes(tree, d, rows);
        std::vector<std::vector<double>> seen(tree.nodes.size());
        for (std::size_t i : rows) seen[leaf_index(tree, RowView(d, i))].push_back(xs[i]);
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            if (!tree.nodes[k].is_leaf()) continue;
            EXPECT_EQ(counts[k], tree.nodes[k].size);
            for (double v : seen[k]) EXPECT_EQ(v, seen[k].front());
        }
        std::size_t total = 0;
        for (const auto& n : tree.nodes) total += n.is_leaf() ? n.size : 0;
        EXPECT_EQ(total, xs.size());
    }
}
