#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rsif/data_model.hpp"
#include "rsif/distances.hpp"
#include "rsif/random.hpp"

namespace rsif {

enum class SelectionStrategy { random, global, local, two_step };

inline std::string_view to_string(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::random: return "random";
        case SelectionStrategy::global: return "global";
        case SelectionStrategy::local: return "local";
        case SelectionStrategy::two_step: return "two_step";
    }
    return "?";
}

inline std::optional<SelectionStrategy> parse_strategy(std::string_view tag) {
    for (auto s : {SelectionStrategy::random, SelectionStrategy::global, SelectionStrategy::local,
                   SelectionStrategy::two_step}) {
        if (to_string(s) == tag) return s;
    }
    return std::nullopt;
}

/// Reference objects (q, r) of one projection. The payloads are copies so a
/// fitted tree can project unseen examples without the training data.
struct ReferencePair {
    std::string feature_id;
    DistanceId distance_id = DistanceId::euclidean;
    Value q_value;
    Value r_value;
    std::size_t q_index = 0;
    std::size_t r_index = 0;

    bool operator==(const ReferencePair&) const = default;
};

/// Training-set indices of a candidate reference pair.
struct IndexPair {
    std::size_t q = 0;
    std::size_t r = 0;
    double distance = 0.0;  // δ(q, r)
    bool operator==(const IndexPair&) const = default;
};

/// δ between two examples of one feature, served from a precomputed matrix
/// when either example is one of its candidate rows.
class DistanceOracle {
public:
    DistanceOracle(const FeatureColumn& column, DistanceId id, const CategoricalStats* stats = nullptr,
                   const DistanceMatrix* matrix = nullptr)
        : column_(&column), id_(id), stats_(stats), matrix_(matrix) {
        check_applicable(id, column);
    }

    double operator()(std::size_t a, std::size_t b) const {
        if (matrix_) {
            if (auto d = matrix_->lookup(a, b)) return *d;
        }
        return distance(id_, column_->values[a], column_->values[b], stats_);
    }

    const FeatureColumn& column() const { return *column_; }
    DistanceId id() const { return id_; }
    const CategoricalStats* stats() const { return stats_; }
    const DistanceMatrix* matrix() const { return matrix_; }

private:
    const FeatureColumn* column_;
    DistanceId id_;
    const CategoricalStats* stats_;
    const DistanceMatrix* matrix_;
};

/// P(x) = δ(r, x) - δ(q, x); the raw scalar for the identity projection.
inline double project(const Value& value, const ReferencePair& pair, const CategoricalStats* stats = nullptr) {
    if (pair.distance_id == DistanceId::identity) {
        const auto* v = std::get_if<RealVector>(&value);
        if (!v || v->values.size() != 1) throw Error("identity projection requires a numeric value");
        return v->values[0];
    }
    if (value.index() != pair.q_value.index()) throw Error("kind mismatch in projection");
    return distance(pair.distance_id, pair.r_value, value, stats) -
           distance(pair.distance_id, pair.q_value, value, stats);
}

/// Projects a whole column. When q and r are both candidate rows of `matrix`
/// (built over this column), distances are read from it instead of recomputed.
inline std::vector<double> project_column(std::span<const Value> values, const ReferencePair& pair,
                                          const CategoricalStats* stats = nullptr,
                                          const DistanceMatrix* matrix = nullptr) {
    std::vector<double> out(values.size());
    if (matrix && pair.distance_id != DistanceId::identity && matrix->n == values.size() &&
        pair.q_index < matrix->n && pair.r_index < matrix->n && matrix->row_of[pair.q_index] >= 0 &&
        matrix->row_of[pair.r_index] >= 0) {
        auto qrow = static_cast<std::size_t>(matrix->row_of[pair.q_index]);
        auto rrow = static_cast<std::size_t>(matrix->row_of[pair.r_index]);
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = matrix->at(rrow, i) - matrix->at(qrow, i);
        return out;
    }
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = project(values[i], pair, stats);
    return out;
}

inline ReferencePair make_reference_pair(const FeatureColumn& column, DistanceId id, const IndexPair& p) {
    return ReferencePair{column.id, id, column.values[p.q], column.values[p.r], p.q, p.r};
}

/// Elements of `subsample` that are also in `pool` (pool sorted ascending),
/// preserving subsample order.
inline std::vector<std::size_t> intersect_pool(std::span<const std::size_t> subsample,
                                               std::span<const std::size_t> pool) {
    std::vector<std::size_t> out;
    if (std::is_sorted(pool.begin(), pool.end())) {
        for (std::size_t i : subsample) {
            if (std::binary_search(pool.begin(), pool.end(), i)) out.push_back(i);
        }
        return out;
    }
    std::vector<std::size_t> sorted(pool.begin(), pool.end());
    std::sort(sorted.begin(), sorted.end());
    return intersect_pool(subsample, sorted);
}

namespace detail {

/// Argmax of δ(c, anchor) over candidates; ties go to the lowest index.
inline std::pair<std::size_t, double> furthest_from(std::span<const std::size_t> candidates, std::size_t anchor,
                                                    const DistanceOracle& delta) {
    std::size_t best = candidates.front();
    double best_d = -1.0;
    for (std::size_t c : candidates) {
        double d = delta(c, anchor);
        if (d > best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return {best, best_d};
}

inline std::optional<IndexPair> accept(std::size_t q, std::size_t r, double d) {
    if (!(d > 0.0)) return std::nullopt;
    return IndexPair{q, r, d};
}

}  // namespace detail

/// Two-step selection: u uniform from pool ∩ subsample, q furthest from u,
/// r furthest from q. Returns nullopt for a degenerate pair (δ(q, r) = 0) or
/// an empty candidate set.
inline std::optional<IndexPair> select_pair_two_step(std::span<const std::size_t> subsample,
                                                     std::span<const std::size_t> pool,
                                                     const DistanceOracle& delta, Rng& rng) {
    auto candidates = intersect_pool(subsample, pool);
    if (candidates.empty()) return std::nullopt;
    std::size_t u = candidates[uniform_index(rng, candidates.size())];
    auto [q, dq] = detail::furthest_from(candidates, u, delta);
    auto [r, dr] = detail::furthest_from(candidates, q, delta);
    return detail::accept(q, r, dr);
}

/// Up to k most distant pairs among `pool` with positive distance, sorted by
/// decreasing distance (ties by ascending (q, r)). O(|pool|²) distance lookups.
inline std::vector<IndexPair> top_distant_pairs(std::span<const std::size_t> pool, const DistanceOracle& delta,
                                                std::size_t k = 10) {
    std::vector<std::size_t> sorted(pool.begin(), pool.end());
    std::sort(sorted.begin(), sorted.end());
    auto worse = [](const IndexPair& a, const IndexPair& b) {
        if (a.distance != b.distance) return a.distance > b.distance;
        return std::pair(a.q, a.r) < std::pair(b.q, b.r);
    };
    std::vector<IndexPair> top;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            double d = delta(sorted[i], sorted[j]);
            if (!(d > 0.0)) continue;
            IndexPair p{sorted[i], sorted[j], d};
            if (top.size() < k) {
                top.insert(std::upper_bound(top.begin(), top.end(), p, worse), p);
            } else if (worse(p, top.back())) {
                top.pop_back();
                top.insert(std::upper_bound(top.begin(), top.end(), p, worse), p);
            }
        }
    }
    return top;
}

/// Reference pair by strategy:
///   random   - uniform distinct pair from pool ∩ subsample
///   global   - uniform draw from the precomputed most-distant pairs
///   local    - most distant pair within pool ∩ subsample
///   two_step - see select_pair_two_step
inline std::optional<IndexPair> select_pair(SelectionStrategy strategy, std::span<const std::size_t> subsample,
                                            std::span<const std::size_t> pool,
                                            std::span<const IndexPair> global_top_pairs,
                                            const DistanceOracle& delta, Rng& rng) {
    switch (strategy) {
        case SelectionStrategy::two_step: return select_pair_two_step(subsample, pool, delta, rng);
        case SelectionStrategy::global: {
            if (global_top_pairs.empty()) return std::nullopt;
            const IndexPair& p = global_top_pairs[uniform_index(rng, global_top_pairs.size())];
            return detail::accept(p.q, p.r, p.distance);
        }
        case SelectionStrategy::random: {
            auto candidates = intersect_pool(subsample, pool);
            if (candidates.size() < 2) return std::nullopt;
            std::size_t a = uniform_index(rng, candidates.size());
            std::size_t b = uniform_index(rng, candidates.size() - 1);
            if (b >= a) ++b;
            std::size_t q = candidates[a], r = candidates[b];
            return detail::accept(q, r, delta(q, r));
        }
        case SelectionStrategy::local: {
            auto candidates = intersect_pool(subsample, pool);
            std::sort(candidates.begin(), candidates.end());
            std::optional<IndexPair> best;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                for (std::size_t j = i + 1; j < candidates.size(); ++j) {
                    double d = delta(candidates[i], candidates[j]);
                    if (!best || d > best->distance) best = IndexPair{candidates[i], candidates[j], d};
                }
            }
            if (!best) return std::nullopt;
            return detail::accept(best->q, best->r, best->distance);
        }
    }
    return std::nullopt;
}

}  // namespace rsif
