#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsif/data_model.hpp"
#include "rsif/parallel.hpp"

namespace rsif {

enum class DistanceId {
    euclidean,
    manhattan,
    chebyshev,
    cosine,
    goodall3,
    lin,
    of,
    wasserstein1,
    dtw,
    degree_divergence,
    identity,
};

inline constexpr DistanceId kAllDistances[] = {
    DistanceId::euclidean, DistanceId::manhattan,    DistanceId::chebyshev, DistanceId::cosine,
    DistanceId::goodall3,  DistanceId::lin,          DistanceId::of,        DistanceId::wasserstein1,
    DistanceId::dtw,       DistanceId::degree_divergence, DistanceId::identity};

inline std::string_view to_string(DistanceId id) {
    switch (id) {
        case DistanceId::euclidean: return "euclidean";
        case DistanceId::manhattan: return "manhattan";
        case DistanceId::chebyshev: return "chebyshev";
        case DistanceId::cosine: return "cosine";
        case DistanceId::goodall3: return "goodall3";
        case DistanceId::lin: return "lin";
        case DistanceId::of: return "of";
        case DistanceId::wasserstein1: return "wasserstein1";
        case DistanceId::dtw: return "dtw";
        case DistanceId::degree_divergence: return "degree_divergence";
        case DistanceId::identity: return "identity";
    }
    return "?";
}

inline std::optional<DistanceId> parse_distance_id(std::string_view tag) {
    for (DistanceId id : kAllDistances) {
        if (to_string(id) == tag) return id;
    }
    return std::nullopt;
}

inline bool is_applicable(DistanceId id, FeatureKind kind) {
    switch (id) {
        case DistanceId::euclidean:
        case DistanceId::manhattan:
        case DistanceId::chebyshev:
        case DistanceId::cosine: return kind == FeatureKind::numeric || kind == FeatureKind::vector;
        case DistanceId::goodall3:
        case DistanceId::lin:
        case DistanceId::of: return kind == FeatureKind::categorical;
        case DistanceId::wasserstein1: return kind == FeatureKind::histogram;
        case DistanceId::dtw: return kind == FeatureKind::timeseries;
        case DistanceId::degree_divergence: return kind == FeatureKind::graph;
        case DistanceId::identity: return kind == FeatureKind::numeric;
    }
    return false;
}

/// Distances that satisfy the triangle inequality.
inline bool is_metric(DistanceId id) {
    return id == DistanceId::euclidean || id == DistanceId::manhattan || id == DistanceId::chebyshev ||
           id == DistanceId::wasserstein1;
}

inline bool is_categorical_measure(DistanceId id) {
    return id == DistanceId::goodall3 || id == DistanceId::lin || id == DistanceId::of;
}

inline void check_same_dim(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw Error("dimension mismatch (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
}

/// Minkowski distance of order 2, 1 or infinity.
inline double vector_distance(DistanceId kind, std::span<const double> x, std::span<const double> y) {
    check_same_dim(x, y);
    double acc = 0.0;
    switch (kind) {
        case DistanceId::euclidean:
            for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
            return std::sqrt(acc);
        case DistanceId::manhattan:
            for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
            return acc;
        case DistanceId::chebyshev:
            for (std::size_t i = 0; i < x.size(); ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
            return acc;
        default: throw Error("not a Minkowski distance: " + std::string(to_string(kind)));
    }
}

/// 1 - cos(x, y). Two zero vectors are at distance 0; one zero vector is at distance 1.
inline double cosine_distance(std::span<const double> x, std::span<const double> y) {
    check_same_dim(x, y);
    double dot = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 && yy == 0.0) return 0.0;
    if (xx == 0.0 || yy == 0.0) return 1.0;
    double cos = dot / (std::sqrt(xx) * std::sqrt(yy));
    return std::clamp(1.0 - cos, 0.0, 2.0);
}

/// Category frequencies of a training column.
struct CategoricalStats {
    std::size_t n_train = 0;
    std::map<std::string, std::size_t> freq;

    /// Observed count, floored at 1 for categories unseen during fitting.
    std::size_t count(const std::string& token) const {
        auto it = freq.find(token);
        return it == freq.end() ? 1 : it->second;
    }

    bool operator==(const CategoricalStats&) const = default;
};

inline CategoricalStats fit_categorical_stats(std::span<const std::string> column) {
    CategoricalStats s;
    s.n_train = column.size();
    for (const auto& token : column) ++s.freq[token];
    return s;
}

inline CategoricalStats fit_categorical_stats(const FeatureColumn& column) {
    CategoricalStats s;
    s.n_train = column.values.size();
    for (const auto& v : column.values) ++s.freq[std::get<Category>(v).token];
    return s;
}

/// 1 - similarity for the Goodall3, Lin and occurrence-frequency measures.
/// With p(a) = f(a)/n and p2(a) = f(a)(f(a)-1)/(n(n-1)):
///   goodall3: sim = 1 - p2(x) if x == y, else 0
///   lin:      sim = 1 if x == y, else 2 ln(p(x)+p(y)) / (ln p(x) + ln p(y)), clamped to [0,1]
///   of:       sim = 1 if x == y, else 1 / (1 + ln(n/f(x)) ln(n/f(y)))
/// Note that goodall3 gives a nonzero self-distance for categories seen more than once.
inline double categorical_distance(DistanceId kind, const CategoricalStats& stats, const std::string& x,
                                   const std::string& y) {
    const double n = static_cast<double>(std::max<std::size_t>(stats.n_train, 1));
    const double fx = static_cast<double>(stats.count(x));
    const double fy = static_cast<double>(stats.count(y));
    double sim = 0.0;
    switch (kind) {
        case DistanceId::goodall3:
            if (x == y) {
                double p2 = n > 1.0 ? fx * (fx - 1.0) / (n * (n - 1.0)) : 0.0;
                sim = 1.0 - p2;
            }
            break;
        case DistanceId::lin:
            if (x == y) {
                sim = 1.0;
            } else {
                double denom = std::log(fx / n) + std::log(fy / n);
                sim = denom == 0.0 ? 0.0 : 2.0 * std::log(fx / n + fy / n) / denom;
            }
            break;
        case DistanceId::of:
            sim = x == y ? 1.0 : 1.0 / (1.0 + std::log(n / fx) * std::log(n / fy));
            break;
        default: throw Error("not a categorical distance: " + std::string(to_string(kind)));
    }
    return 1.0 - std::clamp(sim, 0.0, 1.0);
}

/// Earth mover's distance between weighted point sets on the real line:
/// integral of |CDF1 - CDF2| over the merged support.
inline double wasserstein1(const HistogramValue& h1, const HistogramValue& h2) {
    std::size_t i = 0, j = 0;
    double cdf1 = 0.0, cdf2 = 0.0, total = 0.0;
    double prev = std::min(h1.positions.front(), h2.positions.front());
    while (i < h1.positions.size() || j < h2.positions.size()) {
        double next = std::numeric_limits<double>::infinity();
        if (i < h1.positions.size()) next = h1.positions[i];
        if (j < h2.positions.size()) next = std::min(next, h2.positions[j]);
        total += std::abs(cdf1 - cdf2) * (next - prev);
        while (i < h1.positions.size() && h1.positions[i] == next) cdf1 += h1.masses[i++];
        while (j < h2.positions.size() && h2.positions[j] == next) cdf2 += h2.masses[j++];
        prev = next;
    }
    return total;
}

/// Unconstrained dynamic time warping with |a - b| local cost.
inline double dtw(std::span<const double> s1, std::span<const double> s2) {
    if (s1.empty() || s2.empty()) throw Error("dtw requires nonempty sequences");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(s2.size() + 1, inf), cur(s2.size() + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 0; j < s2.size(); ++j) {
            double best = std::min({prev[j + 1], cur[j], prev[j]});
            cur[j + 1] = std::abs(s1[i] - s2[j]) + best;
        }
        std::swap(prev, cur);
    }
    return prev[s2.size()];
}

/// Normalized node-degree distribution, indexed by degree.
inline std::vector<double> degree_distribution(const GraphValue& g) {
    std::vector<std::size_t> degree(g.num_nodes, 0);
    for (auto [a, b] : g.edges) {
        ++degree[a];
        ++degree[b];
    }
    std::size_t max_degree = degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
    std::vector<double> dist(max_degree + 1, 0.0);
    for (std::size_t d : degree) dist[d] += 1.0;
    for (double& p : dist) p /= static_cast<double>(g.num_nodes);
    return dist;
}

/// Base-2 Jensen-Shannon divergence between degree distributions.
inline double degree_divergence(const GraphValue& g1, const GraphValue& g2) {
    auto p = degree_distribution(g1);
    auto q = degree_distribution(g2);
    std::size_t len = std::max(p.size(), q.size());
    p.resize(len, 0.0);
    q.resize(len, 0.0);
    auto term = [](double a, double m) { return a > 0.0 ? a * std::log2(a / m) : 0.0; };
    double jsd = 0.0;
    for (std::size_t d = 0; d < len; ++d) {
        double m = 0.5 * (p[d] + q[d]);
        if (m == 0.0) continue;
        jsd += 0.5 * (term(p[d], m) + term(q[d], m));
    }
    return std::clamp(jsd, 0.0, 1.0);
}

/// δ(a, b) for any pairwise measure. `stats` is required for categorical measures.
/// The identity measure is a projection, not a distance, and is rejected here.
inline double distance(DistanceId id, const Value& a, const Value& b, const CategoricalStats* stats = nullptr) {
    switch (id) {
        case DistanceId::euclidean:
        case DistanceId::manhattan:
        case DistanceId::chebyshev:
            return vector_distance(id, std::get<RealVector>(a).values, std::get<RealVector>(b).values);
        case DistanceId::cosine:
            return cosine_distance(std::get<RealVector>(a).values, std::get<RealVector>(b).values);
        case DistanceId::goodall3:
        case DistanceId::lin:
        case DistanceId::of:
            if (!stats) throw Error("categorical distance requires fitted statistics");
            return categorical_distance(id, *stats, std::get<Category>(a).token, std::get<Category>(b).token);
        case DistanceId::wasserstein1: return wasserstein1(std::get<HistogramValue>(a), std::get<HistogramValue>(b));
        case DistanceId::dtw:
            return dtw(std::get<TimeSeriesValue>(a).samples, std::get<TimeSeriesValue>(b).samples);
        case DistanceId::degree_divergence:
            return degree_divergence(std::get<GraphValue>(a), std::get<GraphValue>(b));
        case DistanceId::identity: throw Error("identity is a projection and has no pairwise distance");
    }
    throw Error("unknown distance");
}

/// Distances from m candidate rows to all n rows of one feature.
struct DistanceMatrix {
    std::string feature_id;
    DistanceId distance_id = DistanceId::euclidean;
    std::vector<std::size_t> candidate_rows;
    std::size_t n = 0;
    std::vector<double> entries;  // row-major, candidate_rows.size() x n
    std::vector<std::int64_t> row_of;  // example index -> candidate row, or -1

    double at(std::size_t row, std::size_t col) const { return entries[row * n + col]; }

    /// δ(x_a, x_b) if either example is a candidate row.
    std::optional<double> lookup(std::size_t a, std::size_t b) const {
        if (row_of[a] >= 0) return at(static_cast<std::size_t>(row_of[a]), b);
        if (row_of[b] >= 0) return at(static_cast<std::size_t>(row_of[b]), a);
        return std::nullopt;
    }
};

inline void check_applicable(DistanceId id, const FeatureColumn& column) {
    if (!is_applicable(id, column.kind)) {
        throw Error("distance not applicable: " + std::string(to_string(id)) + " on " +
                    std::string(to_string(column.kind)) + " feature '" + column.id + "'");
    }
}

/// entries[i][j] = δ(value[candidates[i]], value[j]).
inline DistanceMatrix precompute_matrix(const Dataset& data, std::string_view feature_id, DistanceId id,
                                        std::span<const std::size_t> candidates,
                                        const CategoricalStats* stats = nullptr, std::size_t jobs = 1) {
    const FeatureColumn& column = data.column(feature_id);
    check_applicable(id, column);
    if (id == DistanceId::identity) throw Error("identity is a projection and has no distance matrix");
    if (is_categorical_measure(id) && !stats) throw Error("categorical distance requires fitted statistics");

    DistanceMatrix m;
    m.feature_id = column.id;
    m.distance_id = id;
    m.candidate_rows.assign(candidates.begin(), candidates.end());
    m.n = data.n;
    m.entries.assign(candidates.size() * data.n, 0.0);
    m.row_of.assign(data.n, -1);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] >= data.n) throw Error("candidate index out of range");
        if (m.row_of[candidates[i]] < 0) m.row_of[candidates[i]] = static_cast<std::int64_t>(i);
    }
    parallel_for(candidates.size(), jobs, [&](std::size_t i) {
        const Value& ref = column.values[candidates[i]];
        double* row = m.entries.data() + i * data.n;
        for (std::size_t j = 0; j < data.n; ++j) row[j] = distance(id, ref, column.values[j], stats);
    });
    return m;
}

}  // namespace rsif
