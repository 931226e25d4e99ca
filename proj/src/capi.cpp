#include <tsel/tsel.h>

#include <exception>
#include <string>

#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
tsel_status guarded(Fn&& fn) {
    try {
        fn();
        return TSEL_OK;
    } catch (const tsel::UsageError& e) {
        g_last_error = e.what();
        return TSEL_ERR_USAGE;
    } catch (const tsel::DataError& e) {
        g_last_error = e.what();
        return TSEL_ERR_DATA;
    } catch (const tsel::ModelError& e) {
        g_last_error = e.what();
        return TSEL_ERR_MODEL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TSEL_ERR_DATA;
    }
}

tsel_status usage_error(const char* message) {
    g_last_error = message;
    return TSEL_ERR_USAGE;
}

std::string str_or_empty(const char* s) { return s ? s : ""; }

}  // namespace

struct tsel_model {
    tsel::ModelArtifact artifact;
};

extern "C" {

const char* tsel_last_error(void) { return g_last_error.c_str(); }

tsel_status tsel_train(const tsel_train_options* options) {
    if (!options || !options->commits_path || !options->results_path || !options->model_out)
        return usage_error("tsel_train: commits_path, results_path, model_out required");
    return guarded([&] {
        tsel::TrainOptions o;
        o.commits_path = options->commits_path;
        o.results_path = options->results_path;
        o.model_out = options->model_out;
        if (options->train_days > 0) o.train_days = options->train_days;
        if (options->val_days > 0) o.val_days = options->val_days;
        o.tune = options->tune != 0;
        if (options->n_trees > 0) o.fixed_config.n_trees = options->n_trees;
        if (options->max_depth > 0) o.fixed_config.max_depth = options->max_depth;
        if (options->learning_rate > 0) o.fixed_config.learning_rate = options->learning_rate;
        tsel::run_train(o);
    });
}

tsel_status tsel_model_open(const char* path, tsel_model** out) {
    if (!path || !out) return usage_error("tsel_model_open: path and out required");
    *out = nullptr;
    return guarded([&] { *out = new tsel_model{tsel::ModelArtifact::load(path)}; });
}

void tsel_model_close(tsel_model* model) { delete model; }

int tsel_model_num_trees(const tsel_model* model) {
    return model ? static_cast<int>(model->artifact.model.trees.size()) : 0;
}

tsel_status tsel_predict(const tsel_model* model, const tsel_predict_options* options) {
    if (!model || !options || !options->change_path || !options->out_path)
        return usage_error("tsel_predict: model, change_path, out_path required");
    return guarded([&] {
        tsel::PredictOptions o;
        o.change_path = options->change_path;
        o.tests_path = str_or_empty(options->tests_path);
        o.out_path = options->out_path;
        if (options->k > 0) o.k = static_cast<std::size_t>(options->k);
        if (options->dependency_hops >= 0) o.dependency_hops = options->dependency_hops;
        tsel::run_predict(model->artifact, o);
    });
}

tsel_status tsel_evaluate(const tsel_model* model, const tsel_evaluate_options* options) {
    if (!model || !options || !options->results_path || !options->out_path)
        return usage_error("tsel_evaluate: model, results_path, out_path required");
    return guarded([&] {
        tsel::EvaluateOptions o;
        o.results_path = options->results_path;
        o.out_path = options->out_path;
        if (options->k > 0) o.k = static_cast<std::size_t>(options->k);
        o.seed = options->seed;
        tsel::run_evaluate(model->artifact, o);
    });
}

tsel_status tsel_bench(const tsel_bench_options* options) {
    if (!options || !options->dataset_path || !options->out_path)
        return usage_error("tsel_bench: dataset_path and out_path required");
    return guarded([&] {
        tsel::BenchOptions o;
        o.dataset_path = options->dataset_path;
        if (options->schema) o.schema = options->schema;
        o.out_path = options->out_path;
        if (options->budget > 0) o.budget = options->budget;
        if (options->train_fraction > 0) o.train_fraction = options->train_fraction;
        tsel::run_bench(o);
    });
}

tsel_status tsel_synth(const tsel_synth_options* options) {
    if (!options || !options->out_dir)
        return usage_error("tsel_synth: out_dir required");
    return guarded([&] {
        tsel::SynthOptions o;
        o.config_path = str_or_empty(options->config_path);
        o.seed = options->seed;
        o.out_dir = options->out_dir;
        tsel::run_synth(o);
    });
}

}  // extern "C"
