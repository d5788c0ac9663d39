#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsif/data_model.hpp"
#include "rsif/distances.hpp"
#include "rsif/parallel.hpp"
#include "rsif/projection.hpp"
#include "rsif/random.hpp"
#include "rsif/tree.hpp"

namespace rsif {

/// Admissible distances per feature id.
struct DistanceConfig {
    std::map<std::string, std::vector<DistanceId>> per_feature;

    bool operator==(const DistanceConfig&) const = default;
};

struct FitParams {
    std::size_t t = 100;
    std::size_t psi = 256;
    double m = 0.5;
    SelectionStrategy strategy = SelectionStrategy::two_step;
    std::uint64_t seed = 0;
    DistanceConfig config;

    bool operator==(const FitParams&) const = default;
};

struct ColumnSchema {
    std::string id;
    FeatureKind kind = FeatureKind::numeric;
    std::size_t dim = 0;  // vector dimensionality; 0 for other kinds

    bool operator==(const ColumnSchema&) const = default;
};

struct RSIFModel {
    FitParams params;
    std::vector<ColumnSchema> schema;
    std::vector<CategoricalStats> stats_by_column;  // empty stats for non-categorical columns
    std::vector<RSITree> trees;
    double c_norm = 0.0;
    std::size_t n_train = 0;
    std::size_t psi_eff = 0;
    std::size_t pool_size = 0;

    bool operator==(const RSIFModel&) const = default;
};

inline std::vector<ColumnSchema> schema_of(const Dataset& data) {
    std::vector<ColumnSchema> schema;
    for (const auto& col : data.columns) {
        std::size_t dim = 0;
        if (col.kind == FeatureKind::vector && !col.values.empty())
            dim = std::get<RealVector>(col.values.front()).values.size();
        else if (col.kind == FeatureKind::numeric)
            dim = 1;
        schema.push_back({col.id, col.kind, dim});
    }
    return schema;
}

/// Throws unless every configured feature exists, every distance applies to
/// its feature's kind, and at least one feature has a distance.
inline void check_config(const Dataset& data, const DistanceConfig& config) {
    bool any = false;
    for (const auto& [id, distances] : config.per_feature) {
        auto c = data.column_index(id);
        if (!c) throw Error("config references unknown feature id '" + id + "'");
        for (DistanceId d : distances) check_applicable(d, data.columns[*c]);
        any = any || !distances.empty();
    }
    if (!any) throw Error("distance config is empty");
}

inline void check_params(const FitParams& p) {
    if (p.t < 1) throw Error("t must be at least 1");
    if (p.psi < 2) throw Error("psi must be at least 2");
    if (!(p.m > 0.0 && p.m <= 1.0)) throw Error("m must lie in (0, 1]");
}

/// ⌈m·n⌉, clamped to [1, n].
inline std::size_t pool_size_for(double m, std::size_t n) {
    auto k = static_cast<std::size_t>(std::ceil(m * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

/// Configured features in dataset column order.
inline std::vector<FeatureDistances> resolve_features(const Dataset& data, const DistanceConfig& config) {
    std::vector<FeatureDistances> out;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        auto it = config.per_feature.find(data.columns[c].id);
        if (it != config.per_feature.end() && !it->second.empty()) out.push_back({c, it->second});
    }
    return out;
}

inline std::vector<CategoricalStats> fit_stats_by_column(const Dataset& data) {
    std::vector<CategoricalStats> stats(data.columns.size());
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (data.columns[c].kind == FeatureKind::categorical) stats[c] = fit_categorical_stats(data.columns[c]);
    }
    return stats;
}

/// Fits a forest. The result depends only on (data, params); `jobs` bounds
/// the threads used for distance precomputation and tree construction.
inline RSIFModel fit(const Dataset& data, const FitParams& params, std::size_t jobs = 1) {
    check_params(params);
    if (data.n < 2) throw Error("need at least 2 examples to fit");
    auto violations = validate(data);
    if (!violations.empty()) throw Error("invalid dataset: " + describe(violations.front()));
    check_config(data, params.config);

    RSIFModel model;
    model.params = params;
    model.schema = schema_of(data);
    model.stats_by_column = fit_stats_by_column(data);
    model.n_train = data.n;
    model.psi_eff = std::min(params.psi, data.n);
    model.c_norm = avg_path_c(model.psi_eff);

    Rng pool_rng = make_stream(params.seed, kPoolStream);
    std::vector<std::size_t> pool = sample_without_replacement(pool_rng, data.n, pool_size_for(params.m, data.n));
    model.pool_size = pool.size();

    auto features = resolve_features(data, params.config);
    std::vector<DistanceMatrix> matrices;
    for (const auto& f : features) {
        for (DistanceId id : f.distances) {
            if (id == DistanceId::identity) continue;
            const auto& col = data.columns[f.column];
            bool seen = false;
            for (const auto& m : matrices) seen = seen || (m.feature_id == col.id && m.distance_id == id);
            if (seen) continue;
            matrices.push_back(precompute_matrix(data, col.id, id, pool, &model.stats_by_column[f.column], jobs));
        }
    }

    TreeBuilder builder(data, std::move(features), pool, params.strategy, model.stats_by_column, matrices);
    const std::size_t depth = max_depth_for(model.psi_eff);
    model.trees.resize(params.t);
    parallel_for(params.t, jobs, [&](std::size_t i) {
        Rng rng = make_stream(params.seed, i);
        auto subsample = sample_without_replacement(rng, data.n, model.psi_eff);
        model.trees[i] = builder.build(subsample, depth, rng);
    });
    return model;
}

/// Throws if `data` does not have the model's columns (same order, ids, kinds).
inline void check_schema(const RSIFModel& model, const Dataset& data) {
    auto schema = schema_of(data);
    if (schema.size() != model.schema.size()) {
        throw Error("schema mismatch: model has " + std::to_string(model.schema.size()) + " columns, data has " +
                    std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        const auto& want = model.schema[c];
        const auto& got = schema[c];
        if (want.id != got.id || want.kind != got.kind || (data.n > 0 && want.dim != got.dim)) {
            throw Error("schema mismatch at column " + std::to_string(c) + ": expected '" + want.id + "' (" +
                        std::string(to_string(want.kind)) + "), got '" + got.id + "' (" +
                        std::string(to_string(got.kind)) + ")");
        }
    }
}

/// Mean path length E(h(x)) over all trees.
inline double mean_path_length(const RSIFModel& model, const RowView& row) {
    double total = 0.0;
    for (const auto& tree : model.trees) total += path_length(tree, row, model.stats_by_column);
    return total / static_cast<double>(model.trees.size());
}

/// f = 2^(-E / c).
inline double score_from_path_length(double mean_path, double c_norm) {
    return std::exp2(-mean_path / c_norm);
}

/// Anomaly score in (0, 1]; higher is more anomalous.
inline double score(const RSIFModel& model, const RowView& row) {
    return score_from_path_length(mean_path_length(model, row), model.c_norm);
}

inline std::vector<double> score_batch(const RSIFModel& model, const Dataset& data, std::size_t jobs = 1) {
    check_schema(model, data);
    std::vector<double> out(data.n);
    parallel_for(data.n, jobs, [&](std::size_t i) { out[i] = score(model, RowView(data, i)); });
    return out;
}

/// 1 where score >= theta.
inline std::vector<int> predict(const RSIFModel& model, const Dataset& data, double theta, std::size_t jobs = 1) {
    auto scores = score_batch(model, data, jobs);
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= theta ? 1 : 0;
    return out;
}

}  // namespace rsif
