#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rsif/error.hpp"

namespace rsif {

enum class FeatureKind { numeric, vector, categorical, histogram, timeseries, graph };

inline constexpr FeatureKind kAllKinds[] = {FeatureKind::numeric,   FeatureKind::vector,
                                            FeatureKind::categorical, FeatureKind::histogram,
                                            FeatureKind::timeseries, FeatureKind::graph};

inline std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::numeric: return "numeric";
        case FeatureKind::vector: return "vector";
        case FeatureKind::categorical: return "categorical";
        case FeatureKind::histogram: return "histogram";
        case FeatureKind::timeseries: return "timeseries";
        case FeatureKind::graph: return "graph";
    }
    return "?";
}

inline std::optional<FeatureKind> parse_feature_kind(std::string_view tag) {
    for (FeatureKind k : kAllKinds) {
        if (to_string(k) == tag) return k;
    }
    return std::nullopt;
}

/// Numeric and vector payloads. A numeric value is a vector of dimension 1.
struct RealVector {
    std::vector<double> values;
    bool operator==(const RealVector&) const = default;
};

struct Category {
    std::string token;
    bool operator==(const Category&) const = default;
};

/// Weighted point histogram: strictly increasing positions, masses summing to 1.
struct HistogramValue {
    std::vector<double> positions;
    std::vector<double> masses;
    bool operator==(const HistogramValue&) const = default;
};

struct TimeSeriesValue {
    std::vector<double> samples;
    bool operator==(const TimeSeriesValue&) const = default;
};

/// Simple undirected graph; edges are stored with first < second.
struct GraphValue {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    bool operator==(const GraphValue&) const = default;
};

using Value = std::variant<RealVector, Category, HistogramValue, TimeSeriesValue, GraphValue>;

/// Whether a payload's alternative is the one a column of `kind` stores.
inline bool holds_kind(const Value& value, FeatureKind kind) {
    switch (kind) {
        case FeatureKind::numeric:
        case FeatureKind::vector: return std::holds_alternative<RealVector>(value);
        case FeatureKind::categorical: return std::holds_alternative<Category>(value);
        case FeatureKind::histogram: return std::holds_alternative<HistogramValue>(value);
        case FeatureKind::timeseries: return std::holds_alternative<TimeSeriesValue>(value);
        case FeatureKind::graph: return std::holds_alternative<GraphValue>(value);
    }
    return false;
}

struct FeatureColumn {
    std::string id;
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<Value> values;

    double scalar(std::size_t i) const { return std::get<RealVector>(values[i]).values[0]; }
};

struct Dataset {
    std::string name;
    std::vector<FeatureColumn> columns;
    std::size_t n = 0;
    std::optional<std::vector<int>> labels;

    /// Column position for an id, or nullopt.
    std::optional<std::size_t> column_index(std::string_view id) const {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].id == id) return c;
        }
        return std::nullopt;
    }

    const FeatureColumn& column(std::string_view id) const {
        auto c = column_index(id);
        if (!c) throw Error("unknown feature id '" + std::string(id) + "'");
        return columns[*c];
    }

    bool has_labels() const { return labels.has_value(); }

    /// Rows selected by `rows`, in the given order. Labels follow the rows.
    Dataset subset(std::span<const std::size_t> rows) const {
        Dataset out;
        out.name = name;
        out.n = rows.size();
        out.columns.reserve(columns.size());
        for (const auto& col : columns) {
            FeatureColumn c{col.id, col.name, col.kind, {}};
            c.values.reserve(rows.size());
            for (std::size_t r : rows) c.values.push_back(col.values.at(r));
            out.columns.push_back(std::move(c));
        }
        if (labels) {
            std::vector<int> l;
            l.reserve(rows.size());
            for (std::size_t r : rows) l.push_back(labels->at(r));
            out.labels = std::move(l);
        }
        return out;
    }
};

/// One example, addressed by column position. Either a view into a dataset
/// row or into a caller-owned vector of payloads.
class RowView {
public:
    RowView(const Dataset& data, std::size_t row) : data_(&data), row_(row) {}
    explicit RowView(std::span<const Value> values) : values_(values) {}

    const Value& operator[](std::size_t column) const {
        return data_ ? data_->columns[column].values[row_] : values_[column];
    }

private:
    const Dataset* data_ = nullptr;
    std::size_t row_ = 0;
    std::span<const Value> values_;
};

struct Violation {
    std::string column;  // empty for dataset-level violations
    std::optional<std::size_t> index;
    std::string message;
};

inline constexpr double kHistogramMassTolerance = 1e-9;

namespace detail {

inline bool all_finite(const std::vector<double>& xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

/// Empty string when the payload satisfies its kind's invariants.
inline std::string payload_problem(const Value& v, FeatureKind kind) {
    if (!holds_kind(v, kind)) return "payload does not match kind " + std::string(to_string(kind));
    switch (kind) {
        case FeatureKind::numeric: {
            const auto& x = std::get<RealVector>(v).values;
            if (x.size() != 1) return "numeric value must have dimension 1";
            if (!all_finite(x)) return "non-finite value";
            return {};
        }
        case FeatureKind::vector: {
            const auto& x = std::get<RealVector>(v).values;
            if (x.empty()) return "empty vector";
            if (!all_finite(x)) return "non-finite value";
            return {};
        }
        case FeatureKind::categorical:
            return std::get<Category>(v).token.empty() ? "empty category token" : std::string{};
        case FeatureKind::histogram: {
            const auto& h = std::get<HistogramValue>(v);
            if (h.positions.empty()) return "histogram has no bins";
            if (h.positions.size() != h.masses.size()) return "histogram positions/masses length mismatch";
            if (!all_finite(h.positions) || !all_finite(h.masses)) return "non-finite value";
            double total = 0.0;
            for (std::size_t i = 0; i < h.masses.size(); ++i) {
                if (h.masses[i] < 0.0) return "negative histogram mass";
                if (i > 0 && !(h.positions[i] > h.positions[i - 1]))
                    return "histogram positions not strictly increasing";
                total += h.masses[i];
            }
            if (std::abs(total - 1.0) > kHistogramMassTolerance) return "histogram masses do not sum to 1";
            return {};
        }
        case FeatureKind::timeseries: {
            const auto& s = std::get<TimeSeriesValue>(v).samples;
            if (s.empty()) return "empty time series";
            if (!all_finite(s)) return "non-finite value";
            return {};
        }
        case FeatureKind::graph: {
            const auto& g = std::get<GraphValue>(v);
            if (g.num_nodes == 0) return "graph must have at least one node";
            std::set<std::pair<std::size_t, std::size_t>> seen;
            for (auto [a, b] : g.edges) {
                if (a >= g.num_nodes || b >= g.num_nodes) return "edge endpoint out of range";
                if (a == b) return "self-loop";
                if (!seen.insert(std::minmax(a, b)).second) return "duplicate edge";
            }
            return {};
        }
    }
    return "unknown kind";
}

}  // namespace detail

/// Every broken invariant of `data`. Empty iff the dataset is well formed.
inline std::vector<Violation> validate(const Dataset& data) {
    std::vector<Violation> out;
    std::set<std::string> ids;
    for (const auto& col : data.columns) {
        if (!ids.insert(col.id).second) out.push_back({col.id, std::nullopt, "duplicate column id"});
        if (col.values.size() != data.n) {
            out.push_back({col.id, std::nullopt, "ragged column lengths"});
        }
        std::optional<std::size_t> dim;
        for (std::size_t i = 0; i < col.values.size(); ++i) {
            std::string problem = detail::payload_problem(col.values[i], col.kind);
            if (!problem.empty()) {
                out.push_back({col.id, i, problem});
                continue;
            }
            if (col.kind == FeatureKind::vector) {
                std::size_t d = std::get<RealVector>(col.values[i]).values.size();
                if (!dim) dim = d;
                else if (*dim != d) out.push_back({col.id, i, "vector dimensionality differs within column"});
            }
        }
    }
    if (data.labels) {
        if (data.labels->size() != data.n) out.push_back({"", std::nullopt, "label length mismatch"});
        for (std::size_t i = 0; i < data.labels->size(); ++i) {
            int l = (*data.labels)[i];
            if (l != 0 && l != 1) out.push_back({"", i, "label must be 0 or 1"});
        }
    }
    return out;
}

inline std::string describe(const Violation& v) {
    std::string s;
    if (!v.column.empty()) s += "column '" + v.column + "'";
    if (v.index) s += (s.empty() ? "" : " ") + std::string("example ") + std::to_string(*v.index);
    if (!s.empty()) s += ": ";
    return s + v.message;
}

}  // namespace rsif
