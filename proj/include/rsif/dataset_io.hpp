#pragma once

// On-disk dataset layout: a directory holding manifest.json plus one text
// file per column (line i = example i) and an optional labels file.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsif/data_model.hpp"

namespace rsif {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline bool parse_double(std::string_view text, double& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc{} && ptr == t.data() + t.size() && std::isfinite(out);
}

inline bool parse_double_list(std::string_view line, std::vector<double>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        double v = 0.0;
        if (!parse_double(line.substr(start, comma == std::string_view::npos ? comma : comma - start), v))
            return false;
        out.push_back(v);
        if (comma == std::string_view::npos) return true;
        start = comma + 1;
    }
}

/// Shortest text that parses back to exactly `x`.
inline std::string format_double(double x) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] inline void fail_at(const std::string& column, std::size_t line_no, const std::string& msg) {
    throw Error("column '" + column + "' line " + std::to_string(line_no) + ": " + msg);
}

inline Value parse_payload(const std::string& line, FeatureKind kind, const std::string& column,
                           std::size_t line_no) {
    switch (kind) {
        case FeatureKind::numeric: {
            double v = 0.0;
            if (!parse_double(line, v)) fail_at(column, line_no, "invalid or missing numeric value");
            return RealVector{{v}};
        }
        case FeatureKind::vector:
        case FeatureKind::timeseries: {
            std::vector<double> xs;
            if (!parse_double_list(line, xs)) fail_at(column, line_no, "invalid or missing decimal list");
            if (kind == FeatureKind::vector) return RealVector{std::move(xs)};
            return TimeSeriesValue{std::move(xs)};
        }
        case FeatureKind::categorical: {
            std::string token = trim(line);
            if (token.empty()) fail_at(column, line_no, "missing categorical value");
            return Category{std::move(token)};
        }
        case FeatureKind::histogram: {
            HistogramValue h;
            try {
                auto j = nlohmann::json::parse(line);
                h.positions = j.at("positions").get<std::vector<double>>();
                h.masses = j.at("masses").get<std::vector<double>>();
            } catch (const nlohmann::json::exception& e) {
                fail_at(column, line_no, std::string("malformed histogram: ") + e.what());
            }
            return h;
        }
        case FeatureKind::graph: {
            GraphValue g;
            std::vector<std::vector<long long>> raw;
            long long nodes = 0;
            try {
                auto j = nlohmann::json::parse(line);
                nodes = j.at("num_nodes").get<long long>();
                raw = j.at("edges").get<std::vector<std::vector<long long>>>();
            } catch (const nlohmann::json::exception& e) {
                fail_at(column, line_no, std::string("malformed graph: ") + e.what());
            }
            if (nodes <= 0) fail_at(column, line_no, "graph must have at least one node");
            g.num_nodes = static_cast<std::size_t>(nodes);
            std::set<std::pair<std::size_t, std::size_t>> edges;
            for (const auto& e : raw) {
                if (e.size() != 2) fail_at(column, line_no, "edge must have two endpoints");
                if (e[0] < 0 || e[1] < 0 || e[0] >= nodes || e[1] >= nodes)
                    fail_at(column, line_no, "edge endpoint out of range");
                if (e[0] == e[1]) fail_at(column, line_no, "self-loop");
                edges.insert(std::minmax(static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1])));
            }
            g.edges.assign(edges.begin(), edges.end());
            return g;
        }
    }
    fail_at(column, line_no, "unknown kind");
}

inline std::string format_payload(const Value& v, FeatureKind kind) {
    auto join = [](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ',';
            s += format_double(xs[i]);
        }
        return s;
    };
    switch (kind) {
        case FeatureKind::numeric:
        case FeatureKind::vector: return join(std::get<RealVector>(v).values);
        case FeatureKind::timeseries: return join(std::get<TimeSeriesValue>(v).samples);
        case FeatureKind::categorical: return std::get<Category>(v).token;
        case FeatureKind::histogram: {
            const auto& h = std::get<HistogramValue>(v);
            return "{\"positions\":[" + join(h.positions) + "],\"masses\":[" + join(h.masses) + "]}";
        }
        case FeatureKind::graph: {
            const auto& g = std::get<GraphValue>(v);
            std::string s = "{\"num_nodes\":" + std::to_string(g.num_nodes) + ",\"edges\":[";
            for (std::size_t i = 0; i < g.edges.size(); ++i) {
                if (i) s += ',';
                s += "[" + std::to_string(g.edges[i].first) + "," + std::to_string(g.edges[i].second) + "]";
            }
            return s + "]}";
        }
    }
    return {};
}

}  // namespace detail

/// Loads a dataset from a manifest file or from a directory containing
/// manifest.json. Throws rsif::Error naming the column and line on bad input.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
    namespace fs = std::filesystem;
    fs::path manifest = fs::is_directory(manifest_path) ? manifest_path / "manifest.json" : manifest_path;
    if (!fs::exists(manifest)) throw Error("manifest not found: " + manifest.string());
    fs::path dir = manifest.parent_path();

    nlohmann::json j;
    try {
        std::ifstream in(manifest);
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + manifest.string() + ": " + e.what());
    }

    Dataset data;
    std::vector<std::pair<std::string, fs::path>> column_files;
    std::optional<fs::path> labels_file;
    try {
        data.name = j.value("name", std::string{});
        data.n = j.at("n").get<std::size_t>();
        for (const auto& c : j.at("columns")) {
            FeatureColumn col;
            col.id = c.at("id").get<std::string>();
            col.name = c.value("name", col.id);
            std::string kind = c.at("kind").get<std::string>();
            auto parsed = parse_feature_kind(kind);
            if (!parsed) throw Error("column '" + col.id + "': unknown kind '" + kind + "'");
            col.kind = *parsed;
            column_files.emplace_back(col.id, dir / c.at("file").get<std::string>());
            data.columns.push_back(std::move(col));
        }
        if (j.contains("labels") && !j.at("labels").is_null())
            labels_file = dir / j.at("labels").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + manifest.string() + ": " + e.what());
    }

    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        auto& col = data.columns[c];
        auto lines = detail::read_lines(column_files[c].second);
        if (lines.size() != data.n) {
            throw Error("column '" + col.id + "': ragged column lengths (" + std::to_string(lines.size()) +
                        " rows, expected " + std::to_string(data.n) + ")");
        }
        col.values.reserve(lines.size());
        std::optional<std::size_t> dim;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            Value v = detail::parse_payload(lines[i], col.kind, col.id, i + 1);
            std::string problem = detail::payload_problem(v, col.kind);
            if (!problem.empty()) detail::fail_at(col.id, i + 1, problem);
            if (col.kind == FeatureKind::vector) {
                std::size_t d = std::get<RealVector>(v).values.size();
                if (dim && *dim != d) detail::fail_at(col.id, i + 1, "vector dimensionality differs within column");
                dim = d;
            }
            col.values.push_back(std::move(v));
        }
    }

    if (labels_file) {
        auto lines = detail::read_lines(*labels_file);
        if (lines.size() != data.n) throw Error("labels: label length mismatch");
        std::vector<int> labels;
        labels.reserve(lines.size());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string t = detail::trim(lines[i]);
            if (t != "0" && t != "1") detail::fail_at("labels", i + 1, "label must be 0 or 1");
            labels.push_back(t == "1" ? 1 : 0);
        }
        data.labels = std::move(labels);
    }

    auto violations = validate(data);
    if (!violations.empty()) throw Error(describe(violations.front()));
    return data;
}

/// Writes `data` as a manifest directory. Output is byte-deterministic.
inline void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["name"] = data.name;
    manifest["n"] = data.n;
    manifest["columns"] = nlohmann::ordered_json::array();
    for (const auto& col : data.columns) {
        std::string file = col.id + ".txt";
        manifest["columns"].push_back({{"id", col.id}, {"kind", to_string(col.kind)}, {"file", file}});
        std::ofstream out(dir / file, std::ios::binary);
        for (const auto& v : col.values) out << detail::format_payload(v, col.kind) << '\n';
        if (!out) throw Error("cannot write " + (dir / file).string());
    }
    if (data.labels) {
        manifest["labels"] = "labels.txt";
        std::ofstream out(dir / "labels.txt", std::ios::binary);
        for (int l : *data.labels) out << l << '\n';
    } else {
        manifest["labels"] = nullptr;
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest in " + dir.string());
}

}  // namespace rsif
