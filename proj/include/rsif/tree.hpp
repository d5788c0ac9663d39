#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rsif/data_model.hpp"
#include "rsif/distances.hpp"
#include "rsif/projection.hpp"
#include "rsif/random.hpp"

namespace rsif {

inline constexpr double kEulerGamma = 0.5772156649;

/// Average path length of an unsuccessful BST search over `size` points:
/// c(0) = c(1) = 0, c(2) = 1, c(s) = 2(ln(s-1) + γ) - 2(s-1)/s.
inline double avg_path_c(std::size_t size) {
    if (size <= 1) return 0.0;
    if (size == 2) return 1.0;
    double s = static_cast<double>(size);
    return 2.0 * (std::log(s - 1.0) + kEulerGamma) - 2.0 * (s - 1.0) / s;
}

/// Smallest d with 2^d >= psi.
inline std::size_t max_depth_for(std::size_t psi) {
    std::size_t d = 0;
    while ((std::size_t{1} << d) < psi) ++d;
    return d;
}

/// Distances configured for one dataset column.
struct FeatureDistances {
    std::size_t column = 0;
    std::vector<DistanceId> distances;
};

struct Split {
    std::size_t column = 0;
    DistanceId distance_id = DistanceId::identity;
    std::optional<ReferencePair> pair;  // absent for the identity projection
    double threshold = 0.0;

    bool operator==(const Split&) const = default;
};

/// Flat node record. Internal nodes carry a split and child positions;
/// leaves only carry the number of training rows that reached them.
struct TreeNode {
    std::size_t size = 0;
    std::size_t depth = 0;
    std::optional<Split> split;
    std::uint32_t left = 0;
    std::uint32_t right = 0;

    bool is_leaf() const { return !split.has_value(); }
    bool operator==(const TreeNode&) const = default;
};

struct RSITree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t max_depth = 0;
    std::size_t subsample_size = 0;

    bool operator==(const RSITree&) const = default;
};

/// Threshold drawn uniformly from the open interval (min(P), max(P)), so both
/// sides of the split are nonempty. nullopt when P is constant, or when min
/// and max are adjacent doubles so no threshold fits strictly between them.
inline std::optional<double> random_threshold(std::span<const double> projections, Rng& rng) {
    if (projections.empty()) return std::nullopt;
    auto [lo, hi] = std::minmax_element(projections.begin(), projections.end());
    double a = *lo, b = *hi;
    if (!(b > a)) return std::nullopt;
    double first_inside = std::nextafter(a, b);
    if (!(first_inside < b)) return std::nullopt;
    std::uniform_real_distribution<double> uniform(a, b);
    for (int tries = 0; tries < 64; ++tries) {
        double thr = uniform(rng);
        if (thr > a && thr < b) return thr;
    }
    return first_inside;  // only reachable when the interval holds a handful of doubles
}

/// Everything a tree needs besides its subsample: the training data, the
/// per-feature distance sets, the reference pool, and optional caches.
class TreeBuilder {
public:
    static constexpr int kMaxSplitAttempts = 8;

    TreeBuilder(const Dataset& data, std::vector<FeatureDistances> features, std::vector<std::size_t> pool,
                SelectionStrategy strategy, std::span<const CategoricalStats> stats_by_column = {},
                std::span<const DistanceMatrix> matrices = {})
        : data_(&data), features_(std::move(features)), pool_(std::move(pool)), strategy_(strategy) {
        std::sort(pool_.begin(), pool_.end());
        oracles_.resize(features_.size());
        global_pairs_.resize(features_.size());
        for (std::size_t f = 0; f < features_.size(); ++f) {
            const FeatureColumn& col = data.columns.at(features_[f].column);
            for (DistanceId id : features_[f].distances) {
                check_applicable(id, col);
                if (id == DistanceId::identity) {
                    oracles_[f].emplace_back(std::nullopt);
                    global_pairs_[f].emplace_back();
                    continue;
                }
                const CategoricalStats* stats = nullptr;
                if (is_categorical_measure(id)) {
                    if (features_[f].column >= stats_by_column.size())
                        throw Error("missing categorical statistics for '" + col.id + "'");
                    stats = &stats_by_column[features_[f].column];
                }
                const DistanceMatrix* matrix = nullptr;
                for (const auto& m : matrices) {
                    if (m.feature_id == col.id && m.distance_id == id) matrix = &m;
                }
                oracles_[f].emplace_back(DistanceOracle(col, id, stats, matrix));
                if (strategy_ == SelectionStrategy::global)
                    global_pairs_[f].push_back(top_distant_pairs(pool_, *oracles_[f].back()));
                else
                    global_pairs_[f].emplace_back();
            }
        }
    }

    const Dataset& data() const { return *data_; }
    const std::vector<FeatureDistances>& features() const { return features_; }
    const std::vector<std::size_t>& pool() const { return pool_; }

    /// A usable (feature slot, distance slot), drawn uniformly among features
    /// whose values are not all equivalent under some configured distance,
    /// then uniformly among that feature's distances.
    std::optional<std::pair<std::size_t, std::size_t>> usable_choices(std::span<const std::size_t> rows,
                                                                      Rng& rng) const {
        std::vector<std::size_t> usable;
        for (std::size_t f = 0; f < features_.size(); ++f) {
            if (is_usable(f, rows)) usable.push_back(f);
        }
        if (usable.empty()) return std::nullopt;
        std::size_t f = usable[uniform_index(rng, usable.size())];
        std::size_t d = uniform_index(rng, features_[f].distances.size());
        return std::pair{f, d};
    }

    /// Whether some pair of rows is separated by at least one of the feature's
    /// distances. Every implemented measure is zero exactly on an equivalence
    /// relation, so comparing all rows against one anchor is exact.
    bool is_usable(std::size_t f, std::span<const std::size_t> rows) const {
        if (rows.size() < 2) return false;
        const FeatureColumn& col = data_->columns[features_[f].column];
        for (std::size_t d = 0; d < features_[f].distances.size(); ++d) {
            if (features_[f].distances[d] == DistanceId::identity) {
                double first = col.scalar(rows[0]);
                for (std::size_t i : rows) {
                    if (col.scalar(i) != first) return true;
                }
                continue;
            }
            const DistanceOracle& delta = *oracles_[f][d];
            std::size_t anchor = anchor_row(rows);
            double self = delta(anchor, anchor);
            for (std::size_t i : rows) {
                if (delta(anchor, i) > self) return true;
            }
        }
        return false;
    }

    /// Projection of `rows` for (feature slot f, distance slot d) with the
    /// reference pair selected per strategy; nullopt if the pair is degenerate.
    std::optional<std::pair<Split, std::vector<double>>> draw_projection(std::size_t f, std::size_t d,
                                                                         std::span<const std::size_t> rows,
                                                                         Rng& rng) const {
        const FeatureColumn& col = data_->columns[features_[f].column];
        DistanceId id = features_[f].distances[d];
        Split split{features_[f].column, id, std::nullopt, 0.0};
        std::vector<double> p(rows.size());
        if (id == DistanceId::identity) {
            for (std::size_t i = 0; i < rows.size(); ++i) p[i] = col.scalar(rows[i]);
            return std::pair{std::move(split), std::move(p)};
        }
        const DistanceOracle& delta = *oracles_[f][d];
        auto candidates = intersect_pool(rows, pool_);
        std::span<const std::size_t> pool = pool_;
        if (candidates.size() < 2) pool = rows;  // too few pool members reached this node
        auto pair = select_pair(strategy_, rows, pool, global_pairs_[f][d], delta, rng);
        if (!pair) return std::nullopt;
        for (std::size_t i = 0; i < rows.size(); ++i) p[i] = delta(pair->r, rows[i]) - delta(pair->q, rows[i]);
        split.pair = make_reference_pair(col, id, *pair);
        return std::pair{std::move(split), std::move(p)};
    }

    RSITree build(std::span<const std::size_t> subsample, std::size_t max_depth, Rng& rng) const {
        RSITree tree;
        tree.max_depth = max_depth;
        tree.subsample_size = subsample.size();
        std::vector<std::size_t> rows(subsample.begin(), subsample.end());
        grow(tree, rows, 0, rng);
        return tree;
    }

private:
    std::size_t anchor_row(std::span<const std::size_t> rows) const {
        for (std::size_t i : rows) {
            if (std::binary_search(pool_.begin(), pool_.end(), i)) return i;
        }
        return rows[0];
    }

    std::uint32_t grow(RSITree& tree, std::vector<std::size_t>& rows, std::size_t depth, Rng& rng) const {
        auto index = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{rows.size(), depth, std::nullopt, 0, 0});
        if (depth >= tree.max_depth || rows.size() < 2) return index;

        for (int attempt = 0; attempt < kMaxSplitAttempts; ++attempt) {
            auto choice = usable_choices(rows, rng);
            if (!choice) return index;
            auto drawn = draw_projection(choice->first, choice->second, rows, rng);
            if (!drawn) continue;
            auto& [split, p] = *drawn;
            auto thr = random_threshold(p, rng);
            if (!thr) continue;
            split.threshold = *thr;

            std::vector<std::size_t> left, right;
            for (std::size_t i = 0; i < rows.size(); ++i) (p[i] <= *thr ? left : right).push_back(rows[i]);
            rows.clear();
            rows.shrink_to_fit();

            tree.nodes[index].split = std::move(split);
            std::uint32_t l = grow(tree, left, depth + 1, rng);
            std::uint32_t r = grow(tree, right, depth + 1, rng);
            tree.nodes[index].left = l;
            tree.nodes[index].right = r;
            return index;
        }
        return index;
    }

    const Dataset* data_;
    std::vector<FeatureDistances> features_;
    std::vector<std::size_t> pool_;
    SelectionStrategy strategy_;
    std::vector<std::vector<std::optional<DistanceOracle>>> oracles_;
    std::vector<std::vector<std::vector<IndexPair>>> global_pairs_;
};

/// Projection of one example at an internal node.
inline double project_row(const Split& split, const RowView& row,
                          std::span<const CategoricalStats> stats_by_column = {}) {
    const Value& v = row[split.column];
    if (split.distance_id == DistanceId::identity) {
        const auto* x = std::get_if<RealVector>(&v);
        if (!x || x->values.size() != 1) throw Error("kind mismatch: identity split needs a numeric value");
        return x->values[0];
    }
    const CategoricalStats* stats = split.column < stats_by_column.size() ? &stats_by_column[split.column] : nullptr;
    return project(v, *split.pair, stats);
}

/// Index of the leaf an example falls into.
inline std::size_t leaf_index(const RSITree& tree, const RowView& row,
                              std::span<const CategoricalStats> stats_by_column = {}) {
    std::size_t node = 0;
    while (!tree.nodes[node].is_leaf()) {
        const Split& s = *tree.nodes[node].split;
        node = project_row(s, row, stats_by_column) <= s.threshold ? tree.nodes[node].left : tree.nodes[node].right;
    }
    return node;
}

/// Leaf depth plus the expected remaining depth c(leaf size).
inline double path_length(const RSITree& tree, const RowView& row,
                          std::span<const CategoricalStats> stats_by_column = {}) {
    const TreeNode& leaf = tree.nodes[leaf_index(tree, row, stats_by_column)];
    return static_cast<double>(leaf.depth) + avg_path_c(leaf.size);
}

/// Deepest leaf depth of a tree.
inline std::size_t tree_depth(const RSITree& tree) {
    std::size_t d = 0;
    for (const auto& n : tree.nodes) d = std::max(d, n.depth);
    return d;
}

}  // namespace rsif
