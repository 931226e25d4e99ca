#include "pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "model_io.hpp"

namespace tsel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::int64_t kDay = 86400;
constexpr int kMaxFileWindowDays = 56;
constexpr int kMaxTestWindowDays = 28;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    return in;
}

// write-to-temp + rename, so a failed run never leaves a partial artifact
void write_file_atomically(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open output file: " + tmp.string());
        out << content;
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw DataError("failed writing output file: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

}  // namespace

void ModelArtifact::save(const std::string& path) const {
    std::ostringstream commits_stream, results_stream;
    write_commit_log(snapshot_commits, commits_stream);
    write_test_results(snapshot_cycles, tests, results_stream);

    json tests_json = json::array();
    for (const auto& t : tests)
        tests_json.push_back({{"test", t.test_id}, {"path", t.test_path}});
    json stability_json = json::array();
    {
        std::map<std::string, StabilityFlags> ordered(stability.begin(), stability.end());
        for (const auto& [id, f] : ordered)
            if (f.unstable())
                stability_json.push_back({{"test", id}, {"flaky", f.flaky}, {"broken", f.broken}});
    }

    json j{{"format", "tsel-model"},
           {"version", Model::kFormatVersion},
           {"model", model_to_json(model)},
           {"vocab", vocab_to_json(vocab)},
           {"snapshot",
            {{"commits_jsonl", commits_stream.str()},
             {"results_jsonl", results_stream.str()},
             {"tests", tests_json},
             {"stability", stability_json}}}};
    write_file_atomically(path, j.dump());
}

ModelArtifact ModelArtifact::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != "tsel-model")
        throw ModelError("not a model file: " + path);
    try {
        ModelArtifact a;
        a.model = model_from_json(j.at("model"));
        a.vocab = vocab_from_json(j.at("vocab"));
        const auto& snap = j.at("snapshot");
        std::istringstream commits_stream(snap.at("commits_jsonl").get<std::string>());
        a.snapshot_commits = parse_commit_log(commits_stream);
        std::istringstream results_stream(snap.at("results_jsonl").get<std::string>());
        a.snapshot_cycles = parse_test_results(results_stream).cycles;
        for (const auto& t : snap.at("tests"))
            a.tests.push_back({t.at("test").get<std::string>(),
                               t.value("path", std::string()), ""});
        for (const auto& s : snap.at("stability"))
            a.stability[s.at("test").get<std::string>()] =
                {s.value("flaky", false), s.value("broken", false)};
        return a;
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file: ") + e.what());
    }
}

void run_train(const TrainOptions& options) {
    auto commits_in = open_input(options.commits_path);
    auto commits = parse_commit_log(commits_in);
    auto results_in = open_input(options.results_path);
    auto parsed = parse_test_results(results_in);

    auto split = chronological_split(parsed.cycles, options.train_days, options.val_days);

    // vocabulary must only see training-window history
    const std::int64_t val_start =
        split.val.front().timestamp;  // all train cycles precede this
    std::vector<CommitRecord> train_commits;
    for (const auto& c : commits)
        if (c.timestamp < val_start) train_commits.push_back(c);
    auto vocab = build_vocabulary(train_commits, parsed.tests);

    FeatureExtractor extractor(commits, parsed.cycles);
    auto train_rows = extractor.build_training_matrix(split.train, parsed.tests, vocab);
    auto val_rows = extractor.build_training_matrix(split.val, parsed.tests, vocab);

    Model model;
    if (options.tune) {
        double positives = 0;
        for (const auto& r : train_rows) positives += *r.label;
        double base_rate = train_rows.empty() ? 0.0 : positives / train_rows.size();
        auto result = tune(train_rows, val_rows, default_tuning_grid(base_rate));
        model = std::move(result.best_model);
    } else {
        model = fit(train_rows, options.fixed_config, vocab.fingerprint());
    }
    model.vocab_fingerprint = vocab.fingerprint();

    ModelArtifact artifact;
    artifact.model = std::move(model);
    artifact.vocab = std::move(vocab);

    const std::int64_t train_end = parsed.cycles.back().timestamp + 1;
    for (const auto& c : commits)
        if (c.timestamp >= train_end - kDay * kMaxFileWindowDays && c.timestamp < train_end)
            artifact.snapshot_commits.push_back(c);
    for (const auto& cy : parsed.cycles)
        if (cy.timestamp >= train_end - kDay * kMaxFileWindowDays) {
            CICycle trimmed = cy;
            trimmed.commit_ids.clear();  // snapshot commits are re-keyed on load
            artifact.snapshot_cycles.push_back(std::move(trimmed));
        }
    artifact.tests = parsed.tests;
    artifact.stability = latest_stability_flags(parsed.cycles);

    artifact.save(options.model_out);
}

namespace {

ChangeSet parse_change_file(const std::string& path, std::string& diff_out,
                            std::string& language_out) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open change file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("change file: malformed JSON");
    try {
        ChangeSet change;
        change.id = j.value("id", std::string("change"));
        change.timestamp = j.at("ts").get<std::int64_t>();
        std::set<std::string> seen;
        for (const auto& f : j.value("files", json::array())) {
            FileChange fc;
            fc.path = normalize_path(f.at("path").get<std::string>());
            fc.change_type = change_type_from_string(f.value("type", std::string("modified")));
            fc.lines_added = f.value("add", std::int64_t{0});
            fc.lines_deleted = f.value("del", std::int64_t{0});
            if (!seen.insert(fc.path).second)
                throw DataError("change file: duplicate path: " + fc.path);
            change.files.push_back(std::move(fc));
        }
        diff_out = j.value("diff", std::string());
        language_out = j.value("language", std::string());
        return change;
    } catch (const json::exception& e) {
        throw DataError(std::string("change file: ") + e.what());
    }
}

std::vector<TestCase> parse_tests_file(const std::string& path) {
    auto in = open_input(path);
    std::vector<TestCase> tests;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("tests file line " + std::to_string(line_no) + ": malformed JSON");
        try {
            tests.push_back({j.at("test").get<std::string>(),
                             normalize_path(j.value("path", std::string())), ""});
        } catch (const json::exception& e) {
            throw DataError("tests file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return tests;
}

// missing language falls back to the changed files' extensions
std::string infer_diff_language(const std::vector<FileChange>& files) {
    bool java = false, kotlin = false;
    for (const auto& f : files) {
        auto ext = path_extension(f.path);
        if (ext == "java") java = true;
        else if (ext == "kt" || ext == "kts") kotlin = true;
        else return "";
    }
    if (java && !kotlin) return "java";
    if (kotlin && !java) return "kotlin";
    return "";
}

}  // namespace

void run_predict(const PredictOptions& options) {
    run_predict(ModelArtifact::load(options.model_path), options);
}

void run_predict(const ModelArtifact& artifact, const PredictOptions& options) {
    std::string diff, language;
    ChangeSet change = parse_change_file(options.change_path, diff, language);

    std::vector<TestCase> tests =
        options.tests_path.empty() ? artifact.tests : parse_tests_file(options.tests_path);

    std::vector<std::string> changed_paths;
    for (const auto& f : change.files) changed_paths.push_back(f.path);

    std::map<std::string, FilterReason> filtered;
    std::vector<ScoredTest> ranked;

    bool skip_all = false;
    FilterReason skip_reason = FilterReason::docs_only_commit;
    if (is_docs_only(changed_paths, options.doc_extensions)) {
        skip_all = true;
        skip_reason = FilterReason::docs_only_commit;
    } else if (!diff.empty()) {
        if (language.empty()) language = infer_diff_language(change.files);
        if (!language.empty() &&
            is_comment_only(diff, diff_language_from_string(language))) {
            skip_all = true;
            skip_reason = FilterReason::comment_only_commit;
        }
    }

    if (skip_all) {
        for (const auto& t : tests) filtered.emplace(t.test_id, skip_reason);
    } else {
        auto stability = stability_filter(tests, artifact.stability);
        for (const auto& [id, reason] : stability.removed) filtered.emplace(id, reason);

        std::vector<std::string> universe;
        for (const auto& [path, slot] : artifact.vocab.file_index) universe.push_back(path);
        for (const auto& p : changed_paths) universe.push_back(p);
        for (const auto& t : tests)
            if (!t.test_path.empty()) universe.push_back(t.test_path);
        std::set<std::string> markers(options.module_markers.begin(),
                                      options.module_markers.end());
        ModuleMap modules(universe, markers);
        auto modular = modular_filter(tests, changed_paths, modules, options.dependency_hops);
        for (const auto& [id, reason] : modular.removed) filtered.emplace(id, reason);

        FeatureExtractor extractor(artifact.snapshot_commits, artifact.snapshot_cycles);
        ranked = rank_tests(artifact.model, change, tests, extractor, artifact.vocab);
    }

    RankedSelection selection = select(ranked, options.k, std::move(filtered));

    json selected = json::array();
    int rank = 1;
    for (const auto& st : selection.selected)
        selected.push_back({{"test", st.test_id}, {"score", st.score}, {"rank", rank++}});
    json filtered_json = json::array();
    for (const auto& [id, reason] : selection.filtered_out)
        filtered_json.push_back({{"test", id}, {"reason", to_string(reason)}});
    json report{{"change_id", change.id},
                {"selected", selected},
                {"filtered", filtered_json},
                {"budget", selection.budget},
                {"model_version", Model::kFormatVersion}};
    write_file_atomically(options.out_path, report.dump(2) + "\n");
}

namespace {

struct RankedCycle {
    std::vector<int> labels;            // rank order
    std::vector<double> durations;      // rank order, seconds
    std::vector<double> scores;         // rank order
};

RankedCycle rank_cycle(const Model& model, const FeatureVocabulary& vocab,
                       const FeatureExtractor& extractor, const CICycle& cycle,
                       const std::unordered_map<std::string, const TestCase*>& tests_by_id) {
    auto ctx = extractor.prepare_change(extractor.cycle_change_set(cycle), vocab);
    struct Entry {
        double score;
        const TestVerdict* v;
    };
    std::vector<Entry> entries;
    entries.reserve(cycle.verdicts.size());
    for (const auto& v : cycle.verdicts) {
        TestCase fallback{v.test_id, "", ""};
        auto it = tests_by_id.find(v.test_id);
        const TestCase& t = it != tests_by_id.end() ? *it->second : fallback;
        FeatureRow row = extractor.row_for_test(ctx, t, vocab);
        entries.push_back({predict(model, row), &v});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.v->test_id < b.v->test_id;
    });
    RankedCycle out;
    for (const auto& e : entries) {
        out.labels.push_back(e.v->verdict == Verdict::failed ? 1 : 0);
        out.durations.push_back(e.v->duration.value_or(0.0));
        out.scores.push_back(e.score);
    }
    return out;
}

json curve_to_json(const std::vector<std::pair<double, double>>& curve) {
    json out = json::array();
    for (const auto& [x, y] : curve) out.push_back({x, y});
    return out;
}

// step-interpolated mean of per-cycle curves on a fixed fraction grid
std::vector<std::pair<double, double>> average_curves(
        const std::vector<std::vector<std::pair<double, double>>>& curves) {
    std::vector<std::pair<double, double>> mean;
    if (curves.empty()) return mean;
    for (int i = 0; i <= 100; ++i) {
        double x = i / 100.0;
        double y = 0;
        for (const auto& c : curves) {
            double v = 0;
            for (const auto& [cx, cy] : c) {
                if (cx <= x) v = cy;
                else break;
            }
            y += v;
        }
        mean.emplace_back(x, y / curves.size());
    }
    return mean;
}

}  // namespace

void run_evaluate(const EvaluateOptions& options) {
    run_evaluate(ModelArtifact::load(options.model_path), options);
}

void run_evaluate(const ModelArtifact& artifact, const EvaluateOptions& options) {
    double t0 = now_seconds();
    auto results_in = open_input(options.results_path);
    auto parsed = parse_test_results(results_in);

    // history = snapshot plus the evaluated cycles; every feature is
    // windowed strictly before its own cycle, so later cycles see earlier ones
    std::vector<CICycle> history = artifact.snapshot_cycles;
    std::set<std::string> known_cycles;
    for (const auto& cy : history) known_cycles.insert(cy.cycle_id);
    for (const auto& cy : parsed.cycles)
        if (!known_cycles.count(cy.cycle_id)) history.push_back(cy);
    FeatureExtractor extractor(artifact.snapshot_commits, history);

    std::unordered_map<std::string, const TestCase*> tests_by_id;
    for (const auto& t : artifact.tests) tests_by_id.emplace(t.test_id, &t);
    for (const auto& t : parsed.tests) tests_by_id.emplace(t.test_id, &t);

    double prep_seconds = now_seconds() - t0;

    std::vector<double> all_scores;
    std::vector<int> all_labels;
    std::vector<std::vector<int>> labels_per_cycle;
    std::vector<double> apfds, napfds;
    std::vector<std::vector<std::pair<double, double>>> curves;
    std::vector<CycleOutcome> outcomes;
    double first_pred = 0, last_pred = 0, pred_total = 0;

    for (const auto& cy : parsed.cycles) {
        if (cy.verdicts.empty()) continue;
        double p0 = now_seconds();
        RankedCycle rc = rank_cycle(artifact.model, artifact.vocab, extractor, cy, tests_by_id);
        double dt = now_seconds() - p0;
        if (pred_total == 0) first_pred = dt;
        last_pred = dt;
        pred_total += dt;

        all_scores.insert(all_scores.end(), rc.scores.begin(), rc.scores.end());
        all_labels.insert(all_labels.end(), rc.labels.begin(), rc.labels.end());
        labels_per_cycle.push_back(rc.labels);
        outcomes.push_back({rc.labels, rc.durations});
        int failures = static_cast<int>(std::count(rc.labels.begin(), rc.labels.end(), 1));
        if (failures > 0) {
            std::vector<int> positions;
            for (std::size_t i = 0; i < rc.labels.size(); ++i)
                if (rc.labels[i] == 1) positions.push_back(static_cast<int>(i + 1));
            apfds.push_back(apfd(positions, static_cast<int>(rc.labels.size()), failures));
            napfds.push_back(napfd(rc.labels, std::min(options.k, rc.labels.size())));
            curves.push_back(confidence_curve(rc.labels));
        }
    }
    if (all_labels.empty()) throw DataError("evaluate: no verdicts in results file");

    MetricReport report;
    report.classification = confusion_metrics(all_scores, all_labels, 0.5);
    report.k = k_metrics(labels_per_cycle, options.k);
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };
    report.apfd = mean(apfds);
    report.napfd = mean(napfds);
    report.curve = average_curves(curves);
    int n_cycles = static_cast<int>(labels_per_cycle.size());
    report.wall_times = {
        {"preparation", prep_seconds},
        {"training", 0.0},
        {"first_prediction", first_pred},
        {"last_prediction", last_pred},
        {"average_prediction", n_cycles > 0 ? pred_total / n_cycles : 0.0},
        {"total", now_seconds() - t0},
    };

    auto strategies = compare_strategies(outcomes, options.k, options.seed);

    json strategies_json = json::array();
    for (const auto& s : strategies)
        strategies_json.push_back({{"strategy", s.strategy},
                                   {"selection_rate", s.selection_rate},
                                   {"precision", s.precision},
                                   {"recall", s.recall},
                                   {"test_minutes", s.test_minutes}});
    json j{{"cycles", n_cycles},
           {"k", options.k},
           {"classification",
            {{"accuracy", report.classification.accuracy},
             {"precision", report.classification.precision},
             {"recall", report.classification.recall},
             {"f1", report.classification.f1},
             {"mcc", report.classification.mcc}}},
           {"k_metrics",
            {{"precision_at_k", report.k.precision_at_k},
             {"recall_at_k", report.k.recall_at_k},
             {"f1_at_k", report.k.f1_at_k}}},
           {"apfd", report.apfd},
           {"napfd", report.napfd},
           {"confidence_curve", curve_to_json(report.curve)},
           {"strategies", strategies_json}};
    write_file_atomically(options.out_path, j.dump(2) + "\n");
    // timings in a sidecar, so the report itself is byte-identical across runs
    write_file_atomically(options.out_path + ".times.json",
                          json(report.wall_times).dump(2) + "\n");

    if (!options.out_path.empty()) {
        // companion CSV with the curve, for external plotting
        std::ostringstream csv;
        csv << "fraction_selected,fraction_failures_found\n";
        for (const auto& [x, y] : report.curve) csv << x << "," << y << "\n";
        write_file_atomically(options.out_path + ".curve.csv", csv.str());
    }
}

BenchResult run_bench(const BenchOptions& options) {
    double t0 = now_seconds();
    if (options.schema != "iofrol_gsdtsr")
        throw UsageError("unknown schema: " + options.schema);
    if (options.budget <= 0.0 || options.budget > 1.0)
        throw UsageError("budget must be in (0,1]");

    auto in = open_input(options.dataset_path);
    auto parsed = parse_ci_csv(in, CsvSchema::iofrol_gsdtsr);
    if (parsed.cycles.size() < 3) throw DataError("insufficient history");

    std::size_t split_at = static_cast<std::size_t>(
        static_cast<double>(parsed.cycles.size()) * options.train_fraction);
    split_at = std::max<std::size_t>(1, std::min(split_at, parsed.cycles.size() - 1));
    std::vector<CICycle> train_cycles(parsed.cycles.begin(), parsed.cycles.begin() + split_at);
    std::vector<CICycle> eval_cycles(parsed.cycles.begin() + split_at, parsed.cycles.end());

    std::vector<CommitRecord> no_commits;  // these datasets carry no change data
    FeatureVocabulary vocab = build_vocabulary(no_commits, parsed.tests);
    FeatureExtractor extractor(no_commits, parsed.cycles);

    auto rows = extractor.build_training_matrix(train_cycles, parsed.tests, vocab);
    double positives = 0;
    for (const auto& r : rows) positives += *r.label;
    double base_rate = rows.empty() ? 0.0 : positives / rows.size();

    LearnerConfig config = options.config;
    if (options.weight_positive_by_base_rate && base_rate > 0.0 && base_rate < 0.5)
        config.positive_class_weight = 1.0 / base_rate;

    double prep_seconds = now_seconds() - t0;
    double t_train = now_seconds();
    Model model = fit(rows, config, vocab.fingerprint());
    double train_seconds = now_seconds() - t_train;

    std::unordered_map<std::string, const TestCase*> tests_by_id;
    for (const auto& t : parsed.tests) tests_by_id.emplace(t.test_id, &t);

    BenchResult result;
    result.cycles = static_cast<int>(parsed.cycles.size());
    std::vector<double> apfds, napfds;
    std::vector<std::vector<int>> labels_per_cycle;
    double first_pred = 0, last_pred = 0, pred_total = 0;
    int pred_count = 0;
    for (const auto& cy : eval_cycles) {
        if (cy.verdicts.empty()) continue;
        double p0 = now_seconds();
        RankedCycle rc = rank_cycle(model, vocab, extractor, cy, tests_by_id);
        double dt = now_seconds() - p0;
        if (pred_count == 0) first_pred = dt;
        last_pred = dt;
        pred_total += dt;
        ++pred_count;

        int failures = static_cast<int>(std::count(rc.labels.begin(), rc.labels.end(), 1));
        if (failures == 0) continue;
        std::vector<int> positions;
        for (std::size_t i = 0; i < rc.labels.size(); ++i)
            if (rc.labels[i] == 1) positions.push_back(static_cast<int>(i + 1));
        apfds.push_back(apfd(positions, static_cast<int>(rc.labels.size()), failures));
        std::size_t selected = static_cast<std::size_t>(
            std::ceil(options.budget * static_cast<double>(rc.labels.size())));
        napfds.push_back(napfd(rc.labels, std::min(selected, rc.labels.size())));
        labels_per_cycle.push_back(std::move(rc.labels));
    }
    result.eval_cycles = static_cast<int>(apfds.size());
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };
    result.mean_apfd = mean(apfds);
    result.mean_napfd = mean(napfds);
    if (!labels_per_cycle.empty()) result.k_metrics = k_metrics(labels_per_cycle, 50);
    result.wall_times = {
        {"preparation", prep_seconds},
        {"training", train_seconds},
        {"first_prediction", first_pred},
        {"last_prediction", last_pred},
        {"average_prediction", pred_count > 0 ? pred_total / pred_count : 0.0},
        {"total", now_seconds() - t0},
    };

    if (!options.out_path.empty()) {
        std::ostringstream csv;
        csv << "dataset,cycles,eval_cycles,budget,apfd,napfd,"
               "precision_at_50,recall_at_50,f1_at_50\n";
        csv << fs::path(options.dataset_path).filename().string() << ","
            << result.cycles << "," << result.eval_cycles << "," << options.budget << ","
            << result.mean_apfd << "," << result.mean_napfd << ","
            << result.k_metrics.precision_at_k << "," << result.k_metrics.recall_at_k << ","
            << result.k_metrics.f1_at_k << "\n";
        write_file_atomically(options.out_path, csv.str());
        write_file_atomically(options.out_path + ".times.json",
                              json(result.wall_times).dump(2) + "\n");
    }
    return result;
}

SynthConfig synth_config_from_json_file(const std::string& path) {
    auto in = open_input(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("synth config: malformed JSON");
    SynthConfig c;
    c.n_files = j.value("n_files", c.n_files);
    c.n_tests = j.value("n_tests", c.n_tests);
    c.n_days = j.value("n_days", c.n_days);
    c.commits_per_day = j.value("commits_per_day", c.commits_per_day);
    c.n_modules = j.value("n_modules", c.n_modules);
    c.n_authors = j.value("n_authors", c.n_authors);
    c.max_files_per_commit = j.value("max_files_per_commit", c.max_files_per_commit);
    c.noise_rate = j.value("noise_rate", c.noise_rate);
    c.n_auto_rules = j.value("n_auto_rules", c.n_auto_rules);
    c.start_timestamp = j.value("start_timestamp", c.start_timestamp);
    for (const auto& r : j.value("fault_rules", json::array()))
        c.fault_rules.push_back({r.at("file").get<std::string>(),
                                 r.at("test").get<std::string>()});
    return c;
}

void run_synth(const SynthOptions& options) {
    SynthConfig config = options.config_path.empty()
                             ? SynthConfig{}
                             : synth_config_from_json_file(options.config_path);
    SynthHistory h = synth_generate(config, options.seed);

    fs::create_directories(options.out_dir);
    std::ostringstream commits_stream, results_stream;
    write_commit_log(h.commits, commits_stream);
    write_test_results(h.cycles, h.tests, results_stream);
    write_file_atomically((fs::path(options.out_dir) / "commits.jsonl").string(),
                          commits_stream.str());
    write_file_atomically((fs::path(options.out_dir) / "results.jsonl").string(),
                          results_stream.str());
    json rules = json::array();
    for (const auto& r : h.rules) rules.push_back({{"file", r.file_path}, {"test", r.test_id}});
    write_file_atomically((fs::path(options.out_dir) / "rules.json").string(),
                          rules.dump(2) + "\n");
}

}  // namespace tsel
