// rsif: fit, score, evaluate and synthesize datasets from the command line.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rsif/rsif.hpp"

namespace {

int cmd_fit(const std::string& data_dir, const std::string& config_path, const std::string& out, std::size_t jobs) {
    auto start = std::chrono::steady_clock::now();
    rsif::Dataset data = rsif::load_dataset(data_dir);
    rsif::RunConfig config = rsif::load_run_config(config_path);
    rsif::FitParams params = config.fit_params();
    if (params.config.per_feature.empty() && !config.candidates.empty()) params.config = config.candidates.front();
    rsif::RSIFModel model = rsif::fit(data, params, jobs);
    rsif::save_model(model, out);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "n=" << data.n << " t=" << model.trees.size() << " psi_eff=" << model.psi_eff
              << " pool=" << model.pool_size << " wall_time_s=" << seconds << "\n";
    return 0;
}

int cmd_score(const std::string& model_path, const std::string& data_dir, const std::string& out,
              std::optional<double> theta, std::size_t jobs) {
    rsif::RSIFModel model = rsif::load_model(model_path);
    rsif::Dataset data = rsif::load_dataset(data_dir);
    auto scores = rsif::score_batch(model, data, jobs);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw rsif::Error("cannot write " + out);
    rsif::write_score_csv(file, scores, theta);
    return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& config_path, std::size_t trials, double train_frac,
             const std::string& out, std::size_t jobs) {
    rsif::Dataset data = rsif::load_dataset(data_dir);
    if (!data.has_labels()) throw rsif::Error("evaluation requires a labeled dataset");
    rsif::RunConfig config = rsif::load_run_config(config_path);
    rsif::FitParams params = config.fit_params();
    if (config.candidates.empty()) rsif::check_config(data, params.config);
    for (const auto& c : config.candidates) rsif::check_config(data, c);
    rsif::TrialPlan plan;
    plan.trials = trials;
    plan.train_fraction = train_frac;
    plan.base_seed = config.seed;
    auto report = rsif::run_trials(data, params, plan, config.candidates, jobs);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw rsif::Error("cannot write " + out);
    file << rsif::report_to_json(report).dump(2) << "\n";
    std::cout << "trials=" << report.trials.size() << " mean_ap=" << report.mean_ap
              << " mean_auc=" << report.mean_auc << "\n";
    return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, double frac, std::uint64_t seed, std::size_t dims,
              const std::string& out) {
    rsif::Dataset data;
    if (kind == "gaussian") data = rsif::synth_gaussian(n, frac, dims, seed);
    else if (kind == "multimodal") data = rsif::synth_multimodal(n, frac, seed);
    else throw rsif::Error("unknown synthetic kind '" + kind + "'");
    rsif::write_dataset(data, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random Similarity Isolation Forest: multi-modal outlier detection"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads for fitting and scoring (results do not depend on it)")
        ->check(CLI::PositiveNumber);

    std::string data_dir, config_path, out, model_path, kind = "gaussian";
    std::optional<double> theta;
    std::size_t trials = 10, n = 1000, dims = 2;
    double train_frac = 0.7, outlier_frac = 0.05;
    std::uint64_t seed = 0;

    auto* fit = app.add_subcommand("fit", "Fit a model on a dataset directory");
    fit->add_option("--data", data_dir, "Dataset directory")->required();
    fit->add_option("--config", config_path, "JSON run config")->required();
    fit->add_option("--out", out, "Model file to write")->required();

    auto* score = app.add_subcommand("score", "Score a dataset with a fitted model");
    score->add_option("--model", model_path, "Model file")->required();
    score->add_option("--data", data_dir, "Dataset directory")->required();
    score->add_option("--out", out, "CSV file to write")->required();
    score->add_option("--theta", theta, "Flag rows with score >= theta");

    auto* eval = app.add_subcommand("eval", "Repeated stratified holdout evaluation");
    eval->add_option("--data", data_dir, "Labeled dataset directory")->required();
    eval->add_option("--config", config_path, "JSON run config")->required();
    eval->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    eval->add_option("--train-frac", train_frac, "Training fraction")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--out", out, "Report JSON to write")->required();

    auto* synth = app.add_subcommand("synth", "Write a labeled synthetic dataset");
    synth->add_option("--kind", kind, "gaussian or multimodal");
    synth->add_option("--n", n, "Number of examples");
    synth->add_option("--outlier-frac", outlier_frac, "Outlier fraction in (0, 0.5)");
    synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--dims", dims, "Dimensions (gaussian only)");
    synth->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*fit) return cmd_fit(data_dir, config_path, out, jobs);
        if (*score) return cmd_score(model_path, data_dir, out, theta, jobs);
        if (*eval) return cmd_eval(data_dir, config_path, trials, train_frac, out, jobs);
        if (*synth) return cmd_synth(kind, n, outlier_frac, seed, dims, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
