#pragma once

#include <string>

#include "eval.hpp"
#include "features.hpp"
#include "ingest.hpp"
#include "learner.hpp"
#include "selector.hpp"

namespace tsel {

// Everything `predict` needs at inference time travels inside the model
// artifact: the fitted ensemble, the vocabulary, and a trimmed history
// snapshot (events within the largest feature window of the training end).
struct ModelArtifact {
    Model model;
    FeatureVocabulary vocab;
    std::vector<CommitRecord> snapshot_commits;
    std::vector<CICycle> snapshot_cycles;
    std::vector<TestCase> tests;
    std::unordered_map<std::string, StabilityFlags> stability;

    void save(const std::string& path) const;
    static ModelArtifact load(const std::string& path);
};

struct TrainOptions {
    std::string commits_path;
    std::string results_path;
    std::string model_out;
    int train_days = 56;
    int val_days = 14;
    bool tune = true;            // off => fit fixed_config on the training window
    LearnerConfig fixed_config;
};

void run_train(const TrainOptions& options);

struct PredictOptions {
    std::string model_path;
    std::string change_path;
    std::string tests_path;  // optional; defaults to the snapshot's tests
    std::string out_path;
    std::size_t k = 50;
    int dependency_hops = 1;
    std::vector<std::string> doc_extensions = {"md"};
    std::vector<std::string> module_markers = {"build.gradle", "build.gradle.kts"};
};

void run_predict(const PredictOptions& options);
void run_predict(const ModelArtifact& artifact, const PredictOptions& options);

struct EvaluateOptions {
    std::string model_path;
    std::string results_path;
    std::string out_path;
    std::size_t k = 50;
    std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateOptions& options);
void run_evaluate(const ModelArtifact& artifact, const EvaluateOptions& options);

struct BenchOptions {
    std::string dataset_path;
    std::string schema = "iofrol_gsdtsr";
    std::string out_path;
    double budget = 0.5;            // fraction of each cycle's suite
    double train_fraction = 0.67;   // chronological cycle split
    LearnerConfig config{.n_trees = 100, .max_depth = 4, .learning_rate = 0.1};
    bool weight_positive_by_base_rate = true;
};

struct BenchResult {
    int cycles = 0;
    int eval_cycles = 0;  // evaluated cycles (those containing failures)
    double mean_apfd = 0;
    double mean_napfd = 0;
    KMetrics k_metrics;
    std::map<std::string, double> wall_times;
};

BenchResult run_bench(const BenchOptions& options);

struct SynthOptions {
    std::string config_path;  // empty => defaults
    std::uint64_t seed = 0;
    std::string out_dir;
};

void run_synth(const SynthOptions& options);

SynthConfig synth_config_from_json_file(const std::string& path);

}  // namespace tsel
