#pragma once

// Model files are JSON documents tagged {"format": "rsif-model", "version": N}.
// Doubles are written in shortest round-trip form, so a loaded model scores
// bit-identically to the one that was saved.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rsif/dataset_io.hpp"
#include "rsif/forest.hpp"

namespace rsif {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using nlohmann::json;

inline json value_to_json(const Value& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, RealVector>) return x.values;
            else if constexpr (std::is_same_v<T, Category>) return x.token;
            else if constexpr (std::is_same_v<T, HistogramValue>) return json{{"positions", x.positions}, {"masses", x.masses}};
            else if constexpr (std::is_same_v<T, TimeSeriesValue>) return x.samples;
            else return json{{"num_nodes", x.num_nodes}, {"edges", x.edges}};
        },
        v);
}

inline Value value_from_json(const json& j, FeatureKind kind) {
    switch (kind) {
        case FeatureKind::numeric:
        case FeatureKind::vector: return RealVector{j.get<std::vector<double>>()};
        case FeatureKind::categorical: return Category{j.get<std::string>()};
        case FeatureKind::histogram:
            return HistogramValue{j.at("positions").get<std::vector<double>>(), j.at("masses").get<std::vector<double>>()};
        case FeatureKind::timeseries: return TimeSeriesValue{j.get<std::vector<double>>()};
        case FeatureKind::graph:
            return GraphValue{j.at("num_nodes").get<std::size_t>(),
                              j.at("edges").get<std::vector<std::pair<std::size_t, std::size_t>>>()};
    }
    throw Error("unknown kind");
}

inline json config_to_json(const DistanceConfig& config) {
    json j = json::object();
    for (const auto& [id, ds] : config.per_feature) {
        json list = json::array();
        for (DistanceId d : ds) list.push_back(std::string(to_string(d)));
        j[id] = list;
    }
    return j;
}

inline DistanceConfig config_from_json(const json& j) {
    DistanceConfig config;
    for (const auto& [id, list] : j.items()) {
        auto& ds = config.per_feature[id];
        for (const auto& tag : list) {
            auto d = parse_distance_id(tag.get<std::string>());
            if (!d) throw Error("unknown distance '" + tag.get<std::string>() + "'");
            ds.push_back(*d);
        }
    }
    return config;
}

}  // namespace detail

inline nlohmann::json model_to_json(const RSIFModel& model) {
    using detail::json;
    json j;
    j["format"] = "rsif-model";
    j["version"] = kModelFormatVersion;
    const auto& p = model.params;
    j["params"] = {{"t", p.t},
                   {"psi", p.psi},
                   {"m", p.m},
                   {"strategy", std::string(to_string(p.strategy))},
                   {"seed", p.seed},
                   {"distances", detail::config_to_json(p.config)}};
    json schema = json::array();
    for (const auto& c : model.schema)
        schema.push_back({{"id", c.id}, {"kind", std::string(to_string(c.kind))}, {"dim", c.dim}});
    j["schema"] = schema;
    json stats = json::object();
    for (std::size_t c = 0; c < model.schema.size(); ++c) {
        if (model.schema[c].kind != FeatureKind::categorical) continue;
        stats[model.schema[c].id] = {{"n_train", model.stats_by_column[c].n_train},
                                     {"freq", model.stats_by_column[c].freq}};
    }
    j["categorical_stats"] = stats;
    j["c_norm"] = model.c_norm;
    j["n_train"] = model.n_train;
    j["psi_eff"] = model.psi_eff;
    j["pool_size"] = model.pool_size;
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            json n = {{"size", node.size}, {"depth", node.depth}};
            if (node.split) {
                const Split& s = *node.split;
                n["column"] = s.column;
                n["distance"] = std::string(to_string(s.distance_id));
                n["threshold"] = s.threshold;
                n["left"] = node.left;
                n["right"] = node.right;
                if (s.pair) {
                    n["pair"] = {{"q_index", s.pair->q_index},
                                 {"r_index", s.pair->r_index},
                                 {"q", detail::value_to_json(s.pair->q_value)},
                                 {"r", detail::value_to_json(s.pair->r_value)}};
                }
            }
            nodes.push_back(std::move(n));
        }
        trees.push_back({{"max_depth", tree.max_depth}, {"subsample_size", tree.subsample_size}, {"nodes", nodes}});
    }
    j["trees"] = trees;
    return j;
}

inline RSIFModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", std::string{}) != "rsif-model") throw Error("corrupt model: not an rsif model");
    if (!j.contains("version") || !j["version"].is_number_integer()) throw Error("corrupt model: missing version");
    if (int v = j["version"].get<int>(); v != kModelFormatVersion)
        throw Error("unsupported version " + std::to_string(v) + " (expected " + std::to_string(kModelFormatVersion) + ")");
    try {
        RSIFModel model;
        const auto& p = j.at("params");
        model.params.t = p.at("t").get<std::size_t>();
        model.params.psi = p.at("psi").get<std::size_t>();
        model.params.m = p.at("m").get<double>();
        auto strategy = parse_strategy(p.at("strategy").get<std::string>());
        if (!strategy) throw Error("corrupt model: unknown strategy");
        model.params.strategy = *strategy;
        model.params.seed = p.at("seed").get<std::uint64_t>();
        model.params.config = detail::config_from_json(p.at("distances"));
        for (const auto& c : j.at("schema")) {
            auto kind = parse_feature_kind(c.at("kind").get<std::string>());
            if (!kind) throw Error("corrupt model: unknown kind");
            model.schema.push_back({c.at("id").get<std::string>(), *kind, c.at("dim").get<std::size_t>()});
        }
        model.stats_by_column.resize(model.schema.size());
        const auto& stats = j.at("categorical_stats");
        for (std::size_t c = 0; c < model.schema.size(); ++c) {
            if (model.schema[c].kind != FeatureKind::categorical) continue;
            const auto& s = stats.at(model.schema[c].id);
            model.stats_by_column[c].n_train = s.at("n_train").get<std::size_t>();
            model.stats_by_column[c].freq = s.at("freq").get<std::map<std::string, std::size_t>>();
        }
        model.c_norm = j.at("c_norm").get<double>();
        model.n_train = j.at("n_train").get<std::size_t>();
        model.psi_eff = j.at("psi_eff").get<std::size_t>();
        model.pool_size = j.at("pool_size").get<std::size_t>();
        for (const auto& t : j.at("trees")) {
            RSITree tree;
            tree.max_depth = t.at("max_depth").get<std::size_t>();
            tree.subsample_size = t.at("subsample_size").get<std::size_t>();
            const auto& nodes = t.at("nodes");
            for (const auto& n : nodes) {
                TreeNode node;
                node.size = n.at("size").get<std::size_t>();
                node.depth = n.at("depth").get<std::size_t>();
                if (n.contains("column")) {
                    Split s;
                    s.column = n.at("column").get<std::size_t>();
                    if (s.column >= model.schema.size()) throw Error("corrupt model: split column out of range");
                    auto d = parse_distance_id(n.at("distance").get<std::string>());
                    if (!d) throw Error("corrupt model: unknown distance");
                    s.distance_id = *d;
                    s.threshold = n.at("threshold").get<double>();
                    node.left = n.at("left").get<std::uint32_t>();
                    node.right = n.at("right").get<std::uint32_t>();
                    if (node.left >= nodes.size() || node.right >= nodes.size())
                        throw Error("corrupt model: child index out of range");
                    if (n.contains("pair")) {
                        const auto& pj = n.at("pair");
                        FeatureKind kind = model.schema[s.column].kind;
                        s.pair = ReferencePair{model.schema[s.column].id,
                                               s.distance_id,
                                               detail::value_from_json(pj.at("q"), kind),
                                               detail::value_from_json(pj.at("r"), kind),
                                               pj.at("q_index").get<std::size_t>(),
                                               pj.at("r_index").get<std::size_t>()};
                    } else if (s.distance_id != DistanceId::identity) {
                        throw Error("corrupt model: split without reference pair");
                    }
                    node.split = std::move(s);
                }
                tree.nodes.push_back(std::move(node));
            }
            if (tree.nodes.empty()) throw Error("corrupt model: empty tree");
            model.trees.push_back(std::move(tree));
        }
        if (model.trees.size() != model.params.t) throw Error("corrupt model: tree count mismatch");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("corrupt model: ") + e.what());
    }
}

inline std::string serialize_model(const RSIFModel& model) { return model_to_json(model).dump() + "\n"; }

inline RSIFModel deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("corrupt model: ") + e.what());
    }
    return model_from_json(j);
}

inline void save_model(const RSIFModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file " + path.string());
    out << serialize_model(model);
    if (!out) throw Error("cannot write model file " + path.string());
}

inline RSIFModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

/// CSV with header `index,score[,flag]`; scores are written in shortest
/// round-trip form (up to 17 significant digits).
inline void write_score_csv(std::ostream& out, std::span<const double> scores, std::optional<double> theta) {
    out << (theta ? "index,score,flag\n" : "index,score\n");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << i << ',' << detail::format_double(scores[i]);
        if (theta) out << ',' << (scores[i] >= *theta ? 1 : 0);
        out << '\n';
    }
}

}  // namespace rsif
