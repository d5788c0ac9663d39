#pragma once

// JSON run configuration shared by the CLI commands. Unknown keys and unknown
// distance or strategy tags are hard errors.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsif/forest.hpp"
#include "rsif/model_io.hpp"

namespace rsif {

struct RunConfig {
    std::size_t t = 100;
    std::size_t psi = 256;
    double m = 0.5;
    SelectionStrategy strategy = SelectionStrategy::two_step;
    std::uint64_t seed = 0;
    std::optional<double> theta;
    DistanceConfig distances;
    std::vector<DistanceConfig> candidates;

    FitParams fit_params() const {
        FitParams p;
        p.t = t;
        p.psi = psi;
        p.m = m;
        p.strategy = strategy;
        p.seed = seed;
        p.config = distances;
        return p;
    }
};

namespace detail {

inline DistanceConfig parse_distance_map(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw Error(where + " must be an object mapping feature ids to distance lists");
    DistanceConfig config;
    for (const auto& [feature, list] : j.items()) {
        if (!list.is_array()) throw Error(where + "." + feature + " must be a list of distance names");
        auto& ds = config.per_feature[feature];
        for (const auto& tag : list) {
            if (!tag.is_string()) throw Error(where + "." + feature + " must contain strings");
            auto d = parse_distance_id(tag.get<std::string>());
            if (!d) throw Error("unknown distance '" + tag.get<std::string>() + "' for feature '" + feature + "'");
            ds.push_back(*d);
        }
    }
    return config;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    static const std::set<std::string> known = {"t", "psi", "m", "strategy", "seed", "theta", "distances", "candidates"};
    if (!j.is_object()) throw Error("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw Error("unknown config key '" + key + "'");
    }
    RunConfig c;
    try {
        if (j.contains("t")) c.t = j["t"].get<std::size_t>();
        if (j.contains("psi")) c.psi = j["psi"].get<std::size_t>();
        if (j.contains("m")) c.m = j["m"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("theta") && !j["theta"].is_null()) c.theta = j["theta"].get<double>();
        if (j.contains("strategy")) {
            auto s = parse_strategy(j["strategy"].get<std::string>());
            if (!s) throw Error("unknown strategy '" + j["strategy"].get<std::string>() + "'");
            c.strategy = *s;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid config value: ") + e.what());
    }
    if (j.contains("distances")) c.distances = detail::parse_distance_map(j["distances"], "distances");
    if (j.contains("candidates")) {
        if (!j["candidates"].is_array()) throw Error("candidates must be a list");
        for (std::size_t i = 0; i < j["candidates"].size(); ++i)
            c.candidates.push_back(detail::parse_distance_map(j["candidates"][i], "candidates[" + std::to_string(i) + "]"));
    }
    check_params(c.fit_params());
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

}  // namespace rsif
