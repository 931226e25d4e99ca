#include "ingest.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace tsel {

using nlohmann::json;

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

json parse_json_line(const std::string& line, std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) line_error(line_no, "malformed JSON record");
    return j;
}

}  // namespace

std::vector<CommitRecord> parse_commit_log(std::istream& in) {
    std::vector<CommitRecord> commits;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json_line(line, line_no);
        CommitRecord c;
        try {
            c.commit_id = j.at("id").get<std::string>();
            c.timestamp = j.at("ts").get<std::int64_t>();
            c.author_id = j.at("author").get<std::string>();
            std::unordered_set<std::string> seen;
            for (const auto& f : j.value("files", json::array())) {
                FileChange fc;
                fc.path = normalize_path(f.at("path").get<std::string>());
                if (fc.path.empty()) line_error(line_no, "field 'path': empty");
                fc.change_type = change_type_from_string(f.at("type").get<std::string>());
                fc.lines_added = f.value("add", std::int64_t{0});
                fc.lines_deleted = f.value("del", std::int64_t{0});
                if (fc.lines_added < 0 || fc.lines_deleted < 0)
                    line_error(line_no, "field 'add'/'del': negative count");
                if (fc.change_type == ChangeType::deleted) fc.lines_added = 0;
                if (!seen.insert(fc.path).second)
                    line_error(line_no, "duplicate path: " + fc.path);
                c.changes.push_back(std::move(fc));
            }
        } catch (const json::exception& e) {
            line_error(line_no, std::string("commit record: ") + e.what());
        }
        commits.push_back(std::move(c));
    }
    return commits;
}

void write_commit_log(const std::vector<CommitRecord>& commits, std::ostream& out) {
    for (const auto& c : commits) {
        json files = json::array();
        for (const auto& f : c.changes) {
            files.push_back({{"path", f.path},
                             {"type", to_string(f.change_type)},
                             {"add", f.lines_added},
                             {"del", f.lines_deleted}});
        }
        json j{{"id", c.commit_id}, {"ts", c.timestamp},
               {"author", c.author_id}, {"files", files}};
        out << j.dump() << "\n";
    }
}

ParsedResults parse_test_results(std::istream& in) {
    ParsedResults parsed;
    std::map<std::string, std::string> test_paths;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json_line(line, line_no);
        CICycle cy;
        try {
            cy.cycle_id = j.at("cycle").get<std::string>();
            cy.timestamp = j.at("ts").get<std::int64_t>();
            for (const auto& c : j.value("commits", json::array()))
                cy.commit_ids.push_back(c.get<std::string>());
            for (const auto& r : j.at("results")) {
                TestVerdict v;
                v.cycle_id = cy.cycle_id;
                v.timestamp = cy.timestamp;
                v.test_id = r.at("test").get<std::string>();
                std::string verdict = r.at("verdict").get<std::string>();
                if (verdict == "passed") v.verdict = Verdict::passed;
                else if (verdict == "failed") v.verdict = Verdict::failed;
                else line_error(line_no, "field 'verdict': invalid value '" + verdict + "'");
                v.flaky = r.value("flaky", false);
                v.broken = r.value("broken", false);
                if (r.contains("duration") && !r["duration"].is_null())
                    v.duration = r["duration"].get<double>();
                std::string path = normalize_path(r.value("path", std::string()));
                auto it = test_paths.find(v.test_id);
                if (it == test_paths.end()) test_paths.emplace(v.test_id, path);
                else if (it->second.empty() && !path.empty()) it->second = path;
                cy.verdicts.push_back(std::move(v));
            }
        } catch (const json::exception& e) {
            line_error(line_no, std::string("results record: ") + e.what());
        }
        parsed.cycles.push_back(std::move(cy));
    }
    std::stable_sort(parsed.cycles.begin(), parsed.cycles.end(),
                     [](const CICycle& a, const CICycle& b) { return a.timestamp < b.timestamp; });
    for (auto& [id, path] : test_paths)
        parsed.tests.push_back({id, path, ""});
    return parsed;
}

void write_test_results(const std::vector<CICycle>& cycles,
                        const std::vector<TestCase>& tests, std::ostream& out) {
    std::unordered_map<std::string, std::string> paths;
    for (const auto& t : tests) paths[t.test_id] = t.test_path;
    for (const auto& cy : cycles) {
        json results = json::array();
        for (const auto& v : cy.verdicts) {
            json r{{"test", v.test_id},
                   {"verdict", v.verdict == Verdict::failed ? "failed" : "passed"}};
            auto it = paths.find(v.test_id);
            if (it != paths.end() && !it->second.empty()) r["path"] = it->second;
            if (v.flaky) r["flaky"] = true;
            if (v.broken) r["broken"] = true;
            if (v.duration) r["duration"] = *v.duration;
            results.push_back(std::move(r));
        }
        json j{{"cycle", cy.cycle_id}, {"ts", cy.timestamp},
               {"commits", cy.commit_ids}, {"results", results}};
        out << j.dump() << "\n";
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

// Accepts epoch seconds or "YYYY-MM-DD[ HH:MM:SS[.frac]]".
std::int64_t parse_csv_timestamp(const std::string& raw, std::size_t line_no) {
    std::string s = raw;
    // strip quotes and whitespace
    while (!s.empty() && (s.front() == '"' || s.front() == ' ')) s.erase(0, 1);
    while (!s.empty() && (s.back() == '"' || s.back() == ' ')) s.pop_back();
    if (s.empty()) line_error(line_no, "column 'LastRun': empty");
    if (s.find('-') == std::string::npos) {
        try {
            return static_cast<std::int64_t>(std::stoll(s));
        } catch (...) {
            line_error(line_no, "column 'LastRun': bad timestamp '" + raw + "'");
        }
    }
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    char t_sep = ' ';
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &t_sep, &h, &mi, &sec);
    if (n < 3) line_error(line_no, "column 'LastRun': bad timestamp '" + raw + "'");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = static_cast<int>(sec);
    return static_cast<std::int64_t>(timegm(&tm));
}

}  // namespace

ParsedResults parse_ci_csv(std::istream& in, CsvSchema schema) {
    if (schema != CsvSchema::iofrol_gsdtsr)
        throw UsageError("unknown CSV schema");
    std::string header;
    if (!std::getline(in, header)) return {};
    auto cols = split_fields(header, ';');
    auto col = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            std::string c = cols[i];
            while (!c.empty() && (c.front() == '"' || c.front() == ' ')) c.erase(0, 1);
            while (!c.empty() && (c.back() == '"' || c.back() == ' ')) c.pop_back();
            if (c == name) return static_cast<int>(i);
        }
        return -1;
    };
    int id_col = col("Id"), cycle_col = col("Cycle"), verdict_col = col("Verdict"),
        lastrun_col = col("LastRun");
    for (auto [idx, name] : {std::pair{id_col, "Id"}, {cycle_col, "Cycle"},
                             {verdict_col, "Verdict"}, {lastrun_col, "LastRun"}}) {
        if (idx < 0) throw DataError(std::string("missing required column: ") + name);
    }
    int duration_col = col("Duration"), name_col = col("Name");

    struct CycleAcc {
        std::int64_t ts = INT64_MIN;
        std::vector<TestVerdict> verdicts;
    };
    std::map<std::string, CycleAcc> by_cycle;
    std::unordered_set<std::string> test_ids;
    std::vector<TestCase> tests;

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_fields(line, ';');
        auto field = [&](int idx) -> std::string {
            return idx >= 0 && idx < static_cast<int>(f.size()) ? f[idx] : std::string();
        };
        TestVerdict v;
        v.test_id = name_col >= 0 && !field(name_col).empty() ? field(name_col) : field(id_col);
        if (v.test_id.empty()) line_error(line_no, "empty test identifier");
        v.cycle_id = field(cycle_col);
        v.timestamp = parse_csv_timestamp(field(lastrun_col), line_no);
        std::string verdict = field(verdict_col);
        v.verdict = (verdict == "1" || verdict == "1.0") ? Verdict::failed : Verdict::passed;
        if (duration_col >= 0 && !field(duration_col).empty()) {
            try { v.duration = std::stod(field(duration_col)); } catch (...) {}
        }
        auto& acc = by_cycle[v.cycle_id];
        acc.ts = std::max(acc.ts, v.timestamp);
        if (test_ids.insert(v.test_id).second) tests.push_back({v.test_id, "", ""});
        acc.verdicts.push_back(std::move(v));
    }

    ParsedResults parsed;
    parsed.tests = std::move(tests);
    for (auto& [cycle_id, acc] : by_cycle) {
        CICycle cy;
        cy.cycle_id = cycle_id;
        cy.timestamp = acc.ts;
        // align every verdict with the cycle timestamp so same-cycle results
        // never look older than the cycle they belong to
        for (auto& v : acc.verdicts) {
            v.cycle_id = cycle_id;
            v.timestamp = acc.ts;
        }
        cy.verdicts = std::move(acc.verdicts);
        parsed.cycles.push_back(std::move(cy));
    }
    std::stable_sort(parsed.cycles.begin(), parsed.cycles.end(),
                     [](const CICycle& a, const CICycle& b) {
                         if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                         return a.cycle_id < b.cycle_id;
                     });
    return parsed;
}

SplitResult chronological_split(const std::vector<CICycle>& cycles,
                                int train_days, int val_days) {
    if (train_days <= 0 || val_days <= 0)
        throw UsageError("train_days and val_days must be positive");
    if (cycles.size() < 2) throw DataError("insufficient history");
    const std::int64_t last = cycles.back().timestamp;
    const std::int64_t val_cutoff = last - std::int64_t{86400} * val_days;
    const std::int64_t train_cutoff = val_cutoff - std::int64_t{86400} * train_days;
    SplitResult split;
    for (const auto& cy : cycles) {
        if (cy.timestamp > val_cutoff) split.val.push_back(cy);
        else if (cy.timestamp > train_cutoff) split.train.push_back(cy);
    }
    if (split.train.empty() || split.val.empty())
        throw DataError("insufficient history");
    return split;
}

std::vector<std::string> synth_file_paths(const SynthConfig& config) {
    std::vector<std::string> paths;
    paths.reserve(config.n_files);
    for (int i = 0; i < config.n_files; ++i) {
        int mod = config.n_modules > 0 ? i % config.n_modules : 0;
        paths.push_back("src/mod" + std::to_string(mod) + "/File" + std::to_string(i) + ".kt");
    }
    return paths;
}

std::vector<TestCase> synth_tests(const SynthConfig& config) {
    std::vector<TestCase> tests;
    tests.reserve(config.n_tests);
    for (int i = 0; i < config.n_tests; ++i) {
        int mod = config.n_modules > 0 ? i % config.n_modules : 0;
        tests.push_back({"t" + std::to_string(i),
                         "src/mod" + std::to_string(mod) + "/tests/Test" + std::to_string(i) + ".kt",
                         ""});
    }
    return tests;
}

SynthHistory synth_generate(const SynthConfig& config, std::uint64_t seed) {
    if (config.n_files < 1 || config.n_tests < 1)
        throw UsageError("n_files and n_tests must be >= 1");
    if (config.noise_rate < 0.0 || config.noise_rate > 1.0)
        throw UsageError("noise_rate must be in [0,1]");

    SynthHistory h;
    auto files = synth_file_paths(config);
    h.tests = synth_tests(config);

    std::unordered_set<std::string> file_set(files.begin(), files.end());
    std::unordered_set<std::string> test_set;
    for (const auto& t : h.tests) test_set.insert(t.test_id);

    h.rules = config.fault_rules;
    if (h.rules.empty() && config.n_auto_rules > 0) {
        // file i and test i share module i % n_modules, so pairing by index
        // co-locates each rule's file and test in one module directory
        int n = std::min({config.n_auto_rules, config.n_files, config.n_tests});
        for (int r = 0; r < n; ++r)
            h.rules.push_back({files[r], h.tests[r].test_id});
    }
    for (const auto& rule : h.rules) {
        if (!file_set.count(rule.file_path))
            throw DataError("fault rule references unknown file: " + rule.file_path);
        if (!test_set.count(rule.test_id))
            throw DataError("fault rule references unknown test: " + rule.test_id);
    }

    std::unordered_map<std::string, std::vector<std::string>> rules_by_test;
    for (const auto& rule : h.rules) rules_by_test[rule.test_id].push_back(rule.file_path);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> author_dist(0, std::max(config.n_authors - 1, 0));
    std::uniform_int_distribution<int> nfiles_dist(1, std::max(config.max_files_per_commit, 1));
    std::uniform_int_distribution<int> lines_dist(0, 40);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // commits are module-local, like real changes: pick a module, then files in it
    int n_modules = std::max(config.n_modules, 1);
    std::vector<std::vector<int>> module_files(n_modules);
    for (int i = 0; i < config.n_files; ++i) module_files[i % n_modules].push_back(i);
    module_files.erase(std::remove_if(module_files.begin(), module_files.end(),
                                      [](const auto& m) { return m.empty(); }),
                       module_files.end());
    // rotate through a shuffled module order instead of sampling uniformly:
    // keeps every file's change cadence steady across any trailing window
    std::vector<int> module_order(module_files.size());
    std::iota(module_order.begin(), module_order.end(), 0);
    std::shuffle(module_order.begin(), module_order.end(), rng);
    std::size_t module_cursor = 0;
    auto next_module = [&]() -> const std::vector<int>& {
        if (module_cursor == module_order.size()) {
            std::shuffle(module_order.begin(), module_order.end(), rng);
            module_cursor = 0;
        }
        return module_files[module_order[module_cursor++]];
    };

    int commit_seq = 0;
    for (int day = 0; day < config.n_days; ++day) {
        std::int64_t day_start = config.start_timestamp + std::int64_t{86400} * day;
        std::unordered_set<std::string> changed_today;
        for (int k = 0; k < config.commits_per_day; ++k) {
            CommitRecord c;
            c.commit_id = "c" + std::to_string(commit_seq++);
            c.timestamp = day_start + 3600 * (k + 1);
            c.author_id = "dev" + std::to_string(author_dist(rng));
            const auto& pool = next_module();
            std::uniform_int_distribution<int> pool_dist(0, static_cast<int>(pool.size()) - 1);
            int n = std::min<int>(nfiles_dist(rng), static_cast<int>(pool.size()));
            std::set<int> picked;
            while (static_cast<int>(picked.size()) < n) picked.insert(pool[pool_dist(rng)]);
            for (int idx : picked) {
                FileChange fc;
                fc.path = files[idx];
                fc.change_type = unit(rng) < 0.1 ? ChangeType::added : ChangeType::modified;
                fc.lines_added = lines_dist(rng);
                fc.lines_deleted = lines_dist(rng);
                changed_today.insert(fc.path);
                c.changes.push_back(std::move(fc));
            }
            h.commits.push_back(std::move(c));
        }
        CICycle cy;
        cy.cycle_id = "cycle" + std::to_string(day);
        cy.timestamp = day_start + 86000;
        for (std::size_t i = h.commits.size() - config.commits_per_day; i < h.commits.size(); ++i)
            cy.commit_ids.push_back(h.commits[i].commit_id);
        for (const auto& t : h.tests) {
            bool rule_hit = false;
            auto it = rules_by_test.find(t.test_id);
            if (it != rules_by_test.end()) {
                for (const auto& path : it->second)
                    if (changed_today.count(path)) { rule_hit = true; break; }
            }
            bool flip = config.noise_rate > 0.0 && unit(rng) < config.noise_rate;
            TestVerdict v;
            v.cycle_id = cy.cycle_id;
            v.test_id = t.test_id;
            v.timestamp = cy.timestamp;
            v.verdict = (rule_hit != flip) ? Verdict::failed : Verdict::passed;
            v.duration = 1.0;
            cy.verdicts.push_back(std::move(v));
        }
        h.cycles.push_back(std::move(cy));
    }
    return h;
}

}  // namespace tsel
