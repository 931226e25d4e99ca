#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <tsel/tsel.h>

namespace {

int report(tsel_status status) {
    if (status != TSEL_OK) std::fprintf(stderr, "tsel: %s\n", tsel_last_error());
    return static_cast<int>(status);
}

int with_model(const std::string& path, tsel_status (*fn)(const tsel_model*, void*),
               void* options) {
    tsel_model* model = nullptr;
    tsel_status status = tsel_model_open(path.c_str(), &model);
    if (status != TSEL_OK) return report(status);
    status = fn(model, options);
    tsel_model_close(model);
    return report(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-based test selection: learn from CI history which "
                 "tests a change is likely to break, then rank and select them."};
    app.require_subcommand(1);
    app.set_config("--config-file");

    std::string commits, results, model_path, change, tests, dataset, config, out, out_dir;
    std::string schema = "iofrol_gsdtsr";
    int train_days = 56, val_days = 14, trees = 0, depth = 0, hops = 1;
    long k = 50;
    unsigned long long seed = 0;
    double learning_rate = 0.0, budget = 0.5, train_fraction = 0.67;
    bool no_tune = false;

    auto* train = app.add_subcommand("train", "Fit a model on commit and test history");
    train->add_option("--commits", commits, "commit log (JSONL)")->required();
    train->add_option("--results", results, "test results (JSONL)")->required();
    train->add_option("--out", out, "model artifact path")->required();
    train->add_option("--train-days", train_days, "training window, days");
    train->add_option("--val-days", val_days, "validation window, days");
    train->add_flag("--no-tune", no_tune, "skip hyperparameter search");
    train->add_option("--trees", trees, "tree count when --no-tune");
    train->add_option("--depth", depth, "max depth when --no-tune");
    train->add_option("--learning-rate", learning_rate, "learning rate when --no-tune");

    auto* predict = app.add_subcommand("predict", "Select tests for one change");
    predict->add_option("--model", model_path, "model artifact")->required();
    predict->add_option("--change", change, "change description (JSON)")->required();
    predict->add_option("--tests", tests, "candidate tests (JSONL); defaults to the model's");
    predict->add_option("--k", k, "selection budget");
    predict->add_option("--hops", hops, "module dependency hops to keep");
    predict->add_option("--out", out, "selection report path")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Replay held-out cycles and report metrics");
    evaluate->add_option("--model", model_path, "model artifact")->required();
    evaluate->add_option("--results", results, "held-out test results (JSONL)")->required();
    evaluate->add_option("--k", k, "selection budget");
    evaluate->add_option("--seed", seed, "seed for the random baseline");
    evaluate->add_option("--out", out, "metric report path")->required();

    auto* bench = app.add_subcommand("bench", "Train and score on a public CI dataset");
    bench->add_option("--dataset", dataset, "dataset CSV")->required();
    bench->add_option("--schema", schema, "dataset schema name");
    bench->add_option("--budget", budget, "selected fraction of each suite");
    bench->add_option("--train-fraction", train_fraction, "chronological split point");
    bench->add_option("--out", out, "result table path")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic history");
    synth->add_option("--config", config, "generator configuration (JSON)");
    synth->add_option("--seed", seed, "generator seed");
    synth->add_option("--out-dir", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(TSEL_ERR_USAGE);
    }

    if (train->parsed()) {
        tsel_train_options o{};
        o.commits_path = commits.c_str();
        o.results_path = results.c_str();
        o.model_out = out.c_str();
        o.train_days = train_days;
        o.val_days = val_days;
        o.tune = no_tune ? 0 : 1;
        o.n_trees = trees;
        o.max_depth = depth;
        o.learning_rate = learning_rate;
        return report(tsel_train(&o));
    }
    if (predict->parsed()) {
        tsel_predict_options o{};
        o.change_path = change.c_str();
        o.tests_path = tests.empty() ? nullptr : tests.c_str();
        o.out_path = out.c_str();
        o.k = k;
        o.dependency_hops = hops;
        return with_model(
            model_path,
            [](const tsel_model* m, void* opts) {
                return tsel_predict(m, static_cast<const tsel_predict_options*>(opts));
            },
            &o);
    }
    if (evaluate->parsed()) {
        tsel_evaluate_options o{};
        o.results_path = results.c_str();
        o.out_path = out.c_str();
        o.k = k;
        o.seed = seed;
        return with_model(
            model_path,
            [](const tsel_model* m, void* opts) {
                return tsel_evaluate(m, static_cast<const tsel_evaluate_options*>(opts));
            },
            &o);
    }
    if (bench->parsed()) {
        tsel_bench_options o{};
        o.dataset_path = dataset.c_str();
        o.schema = schema.c_str();
        o.out_path = out.c_str();
        o.budget = budget;
        o.train_fraction = train_fraction;
        return report(tsel_bench(&o));
    }
    if (synth->parsed()) {
        tsel_synth_options o{};
        o.config_path = config.empty() ? nullptr : config.c_str();
        o.seed = seed;
        o.out_dir = out_dir.c_str();
        return report(tsel_synth(&o));
    }
    return static_cast<int>(TSEL_ERR_USAGE);
}
