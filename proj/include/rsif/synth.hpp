#pragma once

// Labeled synthetic datasets used by the evaluation harness and tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "rsif/data_model.hpp"
#include "rsif/random.hpp"

namespace rsif {

namespace detail {

inline void check_synth_args(std::size_t n, double outlier_fraction) {
    if (n < 20) throw Error("synthetic datasets need n >= 20");
    if (!(outlier_fraction > 0.0 && outlier_fraction < 0.5)) throw Error("outlier fraction must lie in (0, 0.5)");
}

/// Labels with round(n · fraction) outliers at random positions.
inline std::vector<int> planted_labels(Rng& rng, std::size_t n, double outlier_fraction) {
    auto k = static_cast<std::size_t>(std::llround(outlier_fraction * static_cast<double>(n)));
    k = std::max<std::size_t>(k, 1);
    std::vector<int> labels(n, 0);
    for (std::size_t i : sample_without_replacement(rng, n, k)) labels[i] = 1;
    return labels;
}

}  // namespace detail

/// Inliers ~ N(0, I) and outliers ~ U[-6, 6]^dims in a single vector column "x".
inline Dataset synth_gaussian(std::size_t n, double outlier_fraction, std::size_t dims, std::uint64_t seed) {
    detail::check_synth_args(n, outlier_fraction);
    if (dims < 1) throw Error("dims must be at least 1");
    Rng rng = make_stream(seed, 0);
    Dataset data;
    data.name = "synth_gaussian";
    data.n = n;
    data.labels = detail::planted_labels(rng, n, outlier_fraction);
    FeatureColumn col{"x", "x", FeatureKind::vector, {}};
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> wide(-6.0, 6.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(dims);
        for (double& x : v) x = (*data.labels)[i] ? wide(rng) : normal(rng);
        col.values.push_back(RealVector{std::move(v)});
    }
    data.columns.push_back(std::move(col));
    return data;
}

inline constexpr std::size_t kSynthSeriesLength = 32;
inline constexpr std::size_t kSynthBurstLength = 4;
inline constexpr double kSynthBurstAmplitude = 5.0;

/// Three columns: "num" (N(0,1) for every row), "cat" (uniform over a..d) and
/// "ts" (a 32-sample sine period with random phase; outliers add a burst of
/// +5 over 4 consecutive samples). Only "ts" separates outliers.
inline Dataset synth_multimodal(std::size_t n, double outlier_fraction, std::uint64_t seed) {
    detail::check_synth_args(n, outlier_fraction);
    Rng rng = make_stream(seed, 0);
    Dataset data;
    data.name = "synth_multimodal";
    data.n = n;
    data.labels = detail::planted_labels(rng, n, outlier_fraction);
    FeatureColumn num{"num", "num", FeatureKind::numeric, {}};
    FeatureColumn cat{"cat", "cat", FeatureKind::categorical, {}};
    FeatureColumn ts{"ts", "ts", FeatureKind::timeseries, {}};
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> token(0, 3);
    std::uniform_int_distribution<std::size_t> burst_start(0, kSynthSeriesLength - kSynthBurstLength);
    for (std::size_t i = 0; i < n; ++i) {
        num.values.push_back(RealVector{{normal(rng)}});
        cat.values.push_back(Category{std::string(1, static_cast<char>('a' + token(rng)))});
        double phi = phase(rng);
        std::vector<double> s(kSynthSeriesLength);
        for (std::size_t k = 0; k < s.size(); ++k)
            s[k] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(kSynthSeriesLength) + phi);
        if ((*data.labels)[i]) {
            std::size_t start = burst_start(rng);
            for (std::size_t k = start; k < start + kSynthBurstLength; ++k) s[k] += kSynthBurstAmplitude;
        }
        ts.values.push_back(TimeSeriesValue{std::move(s)});
    }
    data.columns.push_back(std::move(num));
    data.columns.push_back(std::move(cat));
    data.columns.push_back(std::move(ts));
    return data;
}

/// Splits every vector column "x" of dimension d into numeric columns
/// "x_0" .. "x_{d-1}"; other columns are kept as they are.
inline Dataset expand_vector_columns(const Dataset& data) {
    Dataset out;
    out.name = data.name;
    out.n = data.n;
    out.labels = data.labels;
    for (const auto& col : data.columns) {
        if (col.kind != FeatureKind::vector) {
            out.columns.push_back(col);
            continue;
        }
        std::size_t dims = col.values.empty() ? 0 : std::get<RealVector>(col.values.front()).values.size();
        for (std::size_t d = 0; d < dims; ++d) {
            std::string id = col.id + "_" + std::to_string(d);
            FeatureColumn c{id, id, FeatureKind::numeric, {}};
            c.values.reserve(data.n);
            for (const auto& v : col.values) c.values.push_back(RealVector{{std::get<RealVector>(v).values[d]}});
            out.columns.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace rsif
