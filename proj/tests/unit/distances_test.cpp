#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rsif/distances.hpp"
#include "support/oracles.hpp"

using namespace rsif;

TEST(VectorDistance, Examples) {
    std::vector<double> x{3.7, -1.0};
    EXPECT_EQ(vector_distance(DistanceId::euclidean, x, x), 0.0);
    std::vector<double> o{0, 0}, p{1, 2}, q{3, 4};
    EXPECT_EQ(vector_distance(DistanceId::manhattan, o, p), 3.0);
    EXPECT_EQ(vector_distance(DistanceId::chebyshev, o, p), 2.0);
    EXPECT_EQ(vector_distance(DistanceId::euclidean, o, q), 5.0);
}

TEST(VectorDistance, DimensionMismatchThrows) {
    std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(vector_distance(DistanceId::euclidean, a, b), Error);
    EXPECT_THROW(cosine_distance(a, b), Error);
}

TEST(CosineDistance, Examples) {
    std::vector<double> ones{1, 1}, e1{1, 0}, e2{0, 1}, neg{-1, 0}, zero{0, 0};
    EXPECT_NEAR(cosine_distance(ones, ones), 0.0, 1e-15);
    EXPECT_EQ(cosine_distance(e1, e2), 1.0);
    EXPECT_EQ(cosine_distance(e1, neg), 2.0);
    EXPECT_EQ(cosine_distance(zero, zero), 0.0);
    EXPECT_EQ(cosine_distance(zero, e1), 1.0);
}

TEST(CategoricalStats, Counts) {
    std::vector<std::string> col{"a", "a", "b"};
    auto s = fit_categorical_stats(col);
    EXPECT_EQ(s.n_train, 3u);
    EXPECT_EQ(s.freq.at("a"), 2u);
    EXPECT_EQ(s.freq.at("b"), 1u);

    std::vector<std::string> one{"x"};
    EXPECT_EQ(fit_categorical_stats(one).freq.at("x"), 1u);

    std::vector<std::string> many(100, "c");
    auto m = fit_categorical_stats(many);
    EXPECT_EQ(m.freq.size(), 1u);
    EXPECT_EQ(m.freq.at("c"), 100u);
    EXPECT_EQ(m.count("unseen"), 1u);
}

TEST(CategoricalDistance, OccurrenceFrequencyEqualIsZero) {
    std::vector<std::string> col{"a", "b", "b"};
    EXPECT_EQ(categorical_distance(DistanceId::of, fit_categorical_stats(col), "a", "a"), 0.0);
    EXPECT_EQ(categorical_distance(DistanceId::lin, fit_categorical_stats(col), "b", "b"), 0.0);
}

TEST(CategoricalDistance, Goodall3MatchesPairCounting) {
    std::vector<std::string> col{"a", "a", "b"};
    auto stats = fit_categorical_stats(col);
    double p2 = oracle::goodall_p2_by_pair_counting(col, "a");
    EXPECT_NEAR(p2, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(categorical_distance(DistanceId::goodall3, stats, "a", "a"), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(categorical_distance(DistanceId::goodall3, stats, "a", "a"), p2, 1e-15);
    EXPECT_EQ(categorical_distance(DistanceId::goodall3, stats, "a", "b"), 1.0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> c;
        std::size_t n = 2 + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) c.push_back(std::string(1, static_cast<char>('a' + rng() % 3)));
        auto s = fit_categorical_stats(c);
        for (const auto& [token, count] : s.freq) {
            EXPECT_NEAR(categorical_distance(DistanceId::goodall3, s, token, token),
                        oracle::goodall_p2_by_pair_counting(c, token), 1e-15);
        }
    }
}

TEST(CategoricalDistance, LinDisjointPairIsMaximal) {
    std::vector<std::string> col{"a", "b"};
    EXPECT_EQ(categorical_distance(DistanceId::lin, fit_categorical_stats(col), "a", "b"), 1.0);
}

TEST(CategoricalDistance, OccurrenceFrequencyExample) {
    CategoricalStats s;
    s.n_train = 4;
    s.freq = {{"a", 1}, {"b", 1}, {"c", 2}};
    double d = categorical_distance(DistanceId::of, s, "a", "b");
    EXPECT_NEAR(d, 1.0 - 1.0 / (1.0 + std::log(4.0) * std::log(4.0)), 1e-15);
    EXPECT_NEAR(d, 0.6577, 5e-5);
}

TEST(CategoricalDistance, UnseenCategoriesUseCountOne) {
    CategoricalStats s;
    s.n_train = 4;
    s.freq = {{"a", 3}, {"b", 1}};
    // "b" was seen once, so an unseen token behaves exactly like it.
    EXPECT_EQ(categorical_distance(DistanceId::of, s, "zz", "a"), categorical_distance(DistanceId::of, s, "b", "a"));
    EXPECT_EQ(categorical_distance(DistanceId::lin, s, "zz", "a"), categorical_distance(DistanceId::lin, s, "b", "a"));
    EXPECT_NEAR(categorical_distance(DistanceId::of, s, "zz", "a"),
                1.0 - 1.0 / (1.0 + std::log(4.0) * std::log(4.0 / 3.0)), 1e-15);
    for (DistanceId id : {DistanceId::goodall3, DistanceId::lin, DistanceId::of}) {
        double d = categorical_distance(id, s, "zz", "yy");
        EXPECT_TRUE(std::isfinite(d));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(Wasserstein, Examples) {
    HistogramValue h{{0.0, 1.0}, {0.5, 0.5}};
    EXPECT_EQ(wasserstein1(h, h), 0.0);
    EXPECT_EQ(wasserstein1(HistogramValue{{0.0}, {1.0}}, HistogramValue{{3.0}, {1.0}}), 3.0);
    HistogramValue one{{1.0}, {1.0}};
    EXPECT_NEAR(wasserstein1(h, one), 0.5, 1e-15);
    EXPECT_NEAR(oracle::transport_lp(h.positions, h.masses, one.positions, one.masses), 0.5, 1e-12);
}

TEST(Dtw, Examples) {
    std::vector<double> s{5, 2, 9};
    EXPECT_EQ(dtw(s, s), 0.0);
    std::vector<double> a{1, 2, 3}, b{1, 2, 2, 3};
    EXPECT_EQ(oracle::dtw_brute_force(a, b), 0.0);
    EXPECT_EQ(dtw(a, b), 0.0);
    std::vector<double> z{0, 0}, o{1, 1};
    EXPECT_EQ(oracle::dtw_brute_force(z, o), 2.0);
    EXPECT_EQ(dtw(z, o), 2.0);
}

TEST(Dtw, MatchesBruteForceOnShortSequences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    std::uniform_int_distribution<std::size_t> len(1, 6);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> a(len(rng)), b(len(rng));
        for (double& x : a) x = std::round(u(rng) * 4) / 4;
        for (double& x : b) x = std::round(u(rng) * 4) / 4;
        EXPECT_EQ(dtw(a, b), oracle::dtw_brute_force(a, b));
    }
}

namespace {

GraphValue path(std::size_t n) {
    GraphValue g{n, {}};
    for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    return g;
}

}  // namespace

TEST(DegreeDivergence, Examples) {
    GraphValue triangle{3, {{0, 1}, {0, 2}, {1, 2}}};
    EXPECT_NEAR(degree_divergence(path(2), triangle), 1.0, 1e-15);
    EXPECT_NEAR(oracle::jsd_of_degrees({1, 1}, {2, 2, 2}), 1.0, 1e-15);
    EXPECT_EQ(degree_divergence(path(3), path(3)), 0.0);
    GraphValue relabelled{3, {{0, 2}, {1, 2}}};  // star centred on node 2: same degree multiset as path(3)
    EXPECT_EQ(degree_divergence(path(3), relabelled), 0.0);
}

TEST(DegreeDivergence, MatchesDirectJsd) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        GraphValue g[2];
        std::vector<std::size_t> deg[2];
        for (int k = 0; k < 2; ++k) {
            g[k].num_nodes = 1 + rng() % 7;
            for (std::size_t a = 0; a < g[k].num_nodes; ++a)
                for (std::size_t b = a + 1; b < g[k].num_nodes; ++b)
                    if (rng() % 2) g[k].edges.push_back({a, b});
            deg[k].assign(g[k].num_nodes, 0);
            for (auto [a, b] : g[k].edges) ++deg[k][a], ++deg[k][b];
        }
        EXPECT_NEAR(degree_divergence(g[0], g[1]), oracle::jsd_of_degrees(deg[0], deg[1]), 1e-12);
    }
}

TEST(Distance, IdentityIsNotPairwise) {
    Value a = RealVector{{1.0}};
    EXPECT_THROW(distance(DistanceId::identity, a, a), Error);
}

TEST(Distance, ApplicabilityTable) {
    EXPECT_TRUE(is_applicable(DistanceId::euclidean, FeatureKind::vector));
    EXPECT_TRUE(is_applicable(DistanceId::cosine, FeatureKind::numeric));
    EXPECT_FALSE(is_applicable(DistanceId::dtw, FeatureKind::numeric));
    EXPECT_TRUE(is_applicable(DistanceId::identity, FeatureKind::numeric));
    EXPECT_FALSE(is_applicable(DistanceId::identity, FeatureKind::vector));
    EXPECT_TRUE(is_applicable(DistanceId::lin, FeatureKind::categorical));
    EXPECT_TRUE(is_applicable(DistanceId::wasserstein1, FeatureKind::histogram));
    EXPECT_TRUE(is_applicable(DistanceId::degree_divergence, FeatureKind::graph));
    for (DistanceId id : kAllDistances) EXPECT_EQ(parse_distance_id(to_string(id)), id);
    EXPECT_FALSE(parse_distance_id("portrait").has_value());
}

// Random payload generators for the property tests below.
namespace {

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double real() { return std::uniform_real_distribution<double>(-5, 5)(rng); }
    std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }

    Value vec(std::size_t d) {
        std::vector<double> v(d);
        for (double& x : v) x = real();
        return RealVector{v};
    }
    Value hist() {
        std::size_t bins = size(1, 4);
        std::vector<double> pos(bins), mass(bins);
        double p = real(), total = 0.0;
        for (std::size_t i = 0; i < bins; ++i) {
            p += 0.1 + std::abs(real());
            pos[i] = p;
            mass[i] = 0.05 + std::abs(real());
            total += mass[i];
        }
        for (double& m : mass) m /= total;
        return HistogramValue{pos, mass};
    }
    Value series() {
        std::vector<double> s(size(1, 8));
        for (double& x : s) x = real();
        return TimeSeriesValue{s};
    }
    Value graph() {
        GraphValue g{size(1, 6), {}};
        for (std::size_t a = 0; a < g.num_nodes; ++a)
            for (std::size_t b = a + 1; b < g.num_nodes; ++b)
                if (rng() % 2) g.edges.push_back({a, b});
        return g;
    }
    Value category() { return Category{std::string(1, static_cast<char>('a' + size(0, 4)))}; }
};

}  // namespace

TEST(DistanceProperties, SymmetricNonnegativeAndZeroOnSelf) {
    Gen gen(42);
    CategoricalStats stats;
    stats.n_train = 10;
    stats.freq = {{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}};
    for (int i = 0; i < 500; ++i) {
        std::size_t d = gen.size(1, 4);
        std::vector<std::pair<DistanceId, std::pair<Value, Value>>> cases = {
            {DistanceId::euclidean, {gen.vec(d), gen.vec(d)}},
            {DistanceId::manhattan, {gen.vec(d), gen.vec(d)}},
            {DistanceId::chebyshev, {gen.vec(d), gen.vec(d)}},
            {DistanceId::cosine, {gen.vec(d), gen.vec(d)}},
            {DistanceId::lin, {gen.category(), gen.category()}},
            {DistanceId::of, {gen.category(), gen.category()}},
            {DistanceId::goodall3, {gen.category(), gen.category()}},
            {DistanceId::wasserstein1, {gen.hist(), gen.hist()}},
            {DistanceId::dtw, {gen.series(), gen.series()}},
            {DistanceId::degree_divergence, {gen.graph(), gen.graph()}},
        };
        for (const auto& [id, xy] : cases) {
            const auto& [x, y] = xy;
            double dxy = distance(id, x, y, &stats);
            EXPECT_GE(dxy, 0.0) << to_string(id);
            EXPECT_EQ(dxy, distance(id, y, x, &stats)) << to_string(id);
            if (id != DistanceId::goodall3) {
                EXPECT_NEAR(distance(id, x, x, &stats), 0.0, 1e-12) << to_string(id);
            }
            if (is_categorical_measure(id) || id == DistanceId::degree_divergence) {
                EXPECT_LE(dxy, 1.0);
            }
            if (id == DistanceId::cosine) {
                EXPECT_LE(dxy, 2.0);
            }
        }
    }
}

TEST(DistanceProperties, TriangleInequalityForMetrics) {
    Gen gen(9);
    for (int i = 0; i < 1000; ++i) {
        std::size_t d = gen.size(1, 4);
        for (DistanceId id : {DistanceId::euclidean, DistanceId::manhattan, DistanceId::chebyshev}) {
            Value a = gen.vec(d), b = gen.vec(d), c = gen.vec(d);
            EXPECT_LE(distance(id, a, c), distance(id, a, b) + distance(id, b, c) + 1e-12);
        }
        Value a = gen.hist(), b = gen.hist(), c = gen.hist();
        EXPECT_LE(wasserstein1(std::get<HistogramValue>(a), std::get<HistogramValue>(c)),
                  wasserstein1(std::get<HistogramValue>(a), std::get<HistogramValue>(b)) +
                      wasserstein1(std::get<HistogramValue>(b), std::get<HistogramValue>(c)) + 1e-12);
    }
}

TEST(DistanceProperties, WassersteinMatchesTransportLp) {
    Gen gen(1234);
    for (int i = 0; i < 300; ++i) {
        auto a = std::get<HistogramValue>(gen.hist());
        auto b = std::get<HistogramValue>(gen.hist());
        EXPECT_NEAR(wasserstein1(a, b), oracle::transport_lp(a.positions, a.masses, b.positions, b.masses), 1e-9);
    }
}

TEST(PrecomputeMatrix, SingleCandidateNumeric) {
    Dataset d;
    d.n = 3;
    d.columns.push_back({"x", "x", FeatureKind::numeric, {RealVector{{0.0}}, RealVector{{3.0}}, RealVector{{10.0}}}});
    std::vector<std::size_t> cand{1};
    auto m = precompute_matrix(d, "x", DistanceId::euclidean, cand);
    EXPECT_EQ(m.at(0, 0), 3.0);
    EXPECT_EQ(m.at(0, 1), 0.0);
    EXPECT_EQ(m.at(0, 2), 7.0);
}

TEST(PrecomputeMatrix, DtwMatrixEqualsPairwiseCalls) {
    Gen gen(77);
    Dataset d;
    d.n = 3;
    FeatureColumn ts{"ts", "ts", FeatureKind::timeseries, {}};
    for (int i = 0; i < 3; ++i) ts.values.push_back(gen.series());
    d.columns.push_back(ts);
    std::vector<std::size_t> cand{0, 1, 2};
    auto m = precompute_matrix(d, "ts", DistanceId::dtw, cand, nullptr, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(m.at(i, i), 0.0);
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(m.at(i, j), dtw(std::get<TimeSeriesValue>(ts.values[i]).samples,
                                      std::get<TimeSeriesValue>(ts.values[j]).samples));
        }
    }
}

TEST(PrecomputeMatrix, ZeroOnOwnColumnForEveryMeasure) {
    Gen gen(8);
    Dataset d;
    d.n = 6;
    FeatureColumn vec{"v", "v", FeatureKind::vector, {}}, hist{"h", "h", FeatureKind::histogram, {}},
        graph{"g", "g", FeatureKind::graph, {}}, cat{"c", "c", FeatureKind::categorical, {}};
    for (std::size_t i = 0; i < d.n; ++i) {
        vec.values.push_back(gen.vec(3));
        hist.values.push_back(gen.hist());
        graph.values.push_back(gen.graph());
        cat.values.push_back(gen.category());
    }
    d.columns = {vec, hist, graph, cat};
    auto stats = fit_categorical_stats(d.columns[3]);
    std::vector<std::size_t> cand{4, 1};
    for (auto [feature, id] : std::vector<std::pair<std::string, DistanceId>>{{"v", DistanceId::euclidean},
                                                                              {"v", DistanceId::cosine},
                                                                              {"h", DistanceId::wasserstein1},
                                                                              {"g", DistanceId::degree_divergence},
                                                                              {"c", DistanceId::lin},
                                                                              {"c", DistanceId::of}}) {
        auto m = precompute_matrix(d, feature, id, cand, &stats);
        for (std::size_t i = 0; i < cand.size(); ++i) EXPECT_NEAR(m.at(i, cand[i]), 0.0, 1e-12) << to_string(id);
    }
}

TEST(PrecomputeMatrix, InapplicablePairingThrows) {
    Dataset d;
    d.n = 1;
    d.columns.push_back({"x", "x", FeatureKind::numeric, {RealVector{{0.0}}}});
    std::vector<std::size_t> cand{0};
    EXPECT_THROW(precompute_matrix(d, "x", DistanceId::dtw, cand), Error);
    EXPECT_THROW(precompute_matrix(d, "x", DistanceId::identity, cand), Error);
}
