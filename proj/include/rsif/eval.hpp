#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsif/data_model.hpp"
#include "rsif/forest.hpp"
#include "rsif/model_io.hpp"
#include "rsif/parallel.hpp"
#include "rsif/random.hpp"

namespace rsif {

struct TrialPlan {
    double train_fraction = 0.7;
    std::size_t trials = 10;
    double validation_fraction = 0.3;
    std::uint64_t base_seed = 0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    double ap = 0.0;
    double auc = 0.0;
    DistanceConfig config;
};

struct MetricsReport {
    std::vector<TrialResult> trials;
    double mean_ap = 0.0;
    double mean_auc = 0.0;
    double std_ap = 0.0;
    double std_auc = 0.0;
};

inline void check_plan(const TrialPlan& plan) {
    auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_unit(plan.train_fraction)) throw Error("train fraction must lie in (0, 1)");
    if (!in_unit(plan.validation_fraction)) throw Error("validation fraction must lie in (0, 1)");
    if (plan.trials < 1) throw Error("trials must be at least 1");
}

struct Holdout {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

/// Class-stratified split: round(fraction · class size) rows of each class go
/// to train, clamped so each class keeps at least one row on each side.
inline Holdout stratified_holdout(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!data.labels) throw Error("stratified split requires labels");
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split fraction must lie in (0, 1)");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < data.n; ++i) by_class[(*data.labels)[i] ? 1 : 0].push_back(i);
    if (by_class[0].empty() || by_class[1].empty()) throw Error("single-class dataset: both labels are required");

    Rng rng = make_stream(seed, kSplitStream);
    Holdout h;
    for (auto& rows : by_class) {
        std::shuffle(rows.begin(), rows.end(), rng);
        auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
        if (rows.size() >= 2) k = std::clamp<std::size_t>(k, 1, rows.size() - 1);
        h.train_rows.insert(h.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k));
        h.test_rows.insert(h.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
    }
    std::sort(h.train_rows.begin(), h.train_rows.end());
    std::sort(h.test_rows.begin(), h.test_rows.end());
    h.train = data.subset(h.train_rows);
    h.test = data.subset(h.test_rows);
    return h;
}

/// Step-function average precision: rows ranked by descending score, ties by
/// ascending index; mean of precision@k over the positive positions.
inline double average_precision(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("labels and scores differ in length");
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::size_t positives = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]]) {
            ++positives;
            sum += static_cast<double>(positives) / static_cast<double>(k + 1);
        }
    }
    if (positives == 0) throw Error("average precision needs at least one positive");
    return sum / static_cast<double>(positives);
}

/// ROC AUC as P(s+ > s-) + P(s+ = s-)/2 via mid-ranks.
inline double roc_auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("labels and scores differ in length");
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double pos = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                pos += 1.0;
                rank_sum += mid_rank;
            }
        }
        i = j;
    }
    double neg = static_cast<double>(labels.size()) - pos;
    if (pos == 0.0 || neg == 0.0) throw Error("ROC AUC needs both classes");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

/// Candidate with the highest validation AP; ties keep the earlier candidate.
inline std::size_t select_distances_index(const Dataset& train, std::span<const DistanceConfig> candidates,
                                          const FitParams& params, const TrialPlan& plan, std::size_t jobs = 1) {
    if (candidates.empty()) throw Error("no candidate distance configs");
    if (candidates.size() == 1) return 0;
    Holdout split = stratified_holdout(train, 1.0 - plan.validation_fraction, params.seed);
    std::vector<double> ap(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        FitParams p = params;
        p.config = candidates[c];
        auto model = fit(split.train, p, jobs);
        ap[c] = average_precision(*split.test.labels, score_batch(model, split.test, jobs));
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < ap.size(); ++c) {
        if (ap[c] > ap[best]) best = c;
    }
    return best;
}

inline DistanceConfig select_distances(const Dataset& train, std::span<const DistanceConfig> candidates,
                                       const FitParams& params, const TrialPlan& plan, std::size_t jobs = 1) {
    return candidates[select_distances_index(train, candidates, params, plan, jobs)];
}

namespace detail {

inline std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace detail

/// Repeated holdout evaluation. Trial j re-draws the split and the model with
/// seed base_seed + j. With candidates, each trial first picks a distance
/// config on a validation part of its training split.
inline MetricsReport run_trials(const Dataset& data, const FitParams& params, const TrialPlan& plan,
                                std::span<const DistanceConfig> candidates = {}, std::size_t jobs = 1) {
    check_plan(plan);
    if (!data.labels) throw Error("evaluation requires labels");
    MetricsReport report;
    std::vector<double> aps, aucs;
    for (std::size_t j = 0; j < plan.trials; ++j) {
        std::uint64_t seed = plan.base_seed + j;
        Holdout split = stratified_holdout(data, plan.train_fraction, seed);
        FitParams p = params;
        p.seed = seed;
        if (!candidates.empty()) p.config = select_distances(split.train, candidates, p, plan, jobs);
        auto model = fit(split.train, p, jobs);
        auto scores = score_batch(model, split.test, jobs);
        TrialResult r{seed, average_precision(*split.test.labels, scores), roc_auc(*split.test.labels, scores),
                      p.config};
        aps.push_back(r.ap);
        aucs.push_back(r.auc);
        report.trials.push_back(std::move(r));
    }
    std::tie(report.mean_ap, report.std_ap) = detail::mean_and_std(aps);
    std::tie(report.mean_auc, report.std_auc) = detail::mean_and_std(aucs);
    return report;
}

inline nlohmann::ordered_json report_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["trials"] = nlohmann::ordered_json::array();
    for (const auto& t : report.trials) {
        nlohmann::ordered_json entry;
        entry["seed"] = t.seed;
        entry["ap"] = t.ap;
        entry["auc"] = t.auc;
        entry["distances"] = detail::config_to_json(t.config);
        j["trials"].push_back(entry);
    }
    j["mean_ap"] = report.mean_ap;
    j["mean_auc"] = report.mean_auc;
    j["std_ap"] = report.std_ap;
    j["std_auc"] = report.std_auc;
    return j;
}

}  // namespace rsif
