#pragma once

#include <iosfwd>
#include <random>

#include "datamodel.hpp"

namespace tsel {

// Line-delimited JSON commit log:
//   {"id": str, "ts": int, "author": str,
//    "files": [{"path": str, "type": str, "add": int, "del": int}]}
std::vector<CommitRecord> parse_commit_log(std::istream& in);
void write_commit_log(const std::vector<CommitRecord>& commits, std::ostream& out);

struct ParsedResults {
    std::vector<CICycle> cycles;        // sorted by timestamp
    std::vector<TestCase> tests;        // distinct tests, with paths when given
};

// Line-delimited JSON test results:
//   {"cycle": str, "ts": int, "commits": [str],
//    "results": [{"test": str, "path": str?, "verdict": "passed|failed",
//                 "flaky": bool?, "broken": bool?, "duration": float?}]}
ParsedResults parse_test_results(std::istream& in);
void write_test_results(const std::vector<CICycle>& cycles,
                        const std::vector<TestCase>& tests, std::ostream& out);

enum class CsvSchema { iofrol_gsdtsr };

// ";"-delimited public CI datasets. Required columns: Id, Cycle, Verdict,
// LastRun. Optional: Duration, Name (test identifier when present).
// Verdict encoding: 1 = failed, 0 = passed.
ParsedResults parse_ci_csv(std::istream& in, CsvSchema schema);

struct SplitResult {
    std::vector<CICycle> train;
    std::vector<CICycle> val;
};

// Windows measured back from the last cycle: val = last val_days,
// train = the train_days before them. Exact 86400-second arithmetic.
SplitResult chronological_split(const std::vector<CICycle>& cycles,
                                int train_days, int val_days);

struct FaultRule {
    std::string file_path;
    std::string test_id;
};

struct SynthConfig {
    int n_files = 100;
    int n_tests = 50;
    int n_days = 30;
    int commits_per_day = 4;
    int n_modules = 10;
    int n_authors = 8;
    int max_files_per_commit = 6;
    double noise_rate = 0.0;
    std::vector<FaultRule> fault_rules;  // empty + n_auto_rules>0 => generated
    int n_auto_rules = 0;
    std::int64_t start_timestamp = 1700000000;
};

struct SynthHistory {
    std::vector<CommitRecord> commits;
    std::vector<CICycle> cycles;
    std::vector<TestCase> tests;
    std::vector<FaultRule> rules;  // the rules actually applied
};

// Deterministic given (config, seed). A test fails in a cycle iff one of its
// rule files changed in that cycle's commits, XOR a Bernoulli(noise_rate) flip.
SynthHistory synth_generate(const SynthConfig& config, std::uint64_t seed);

// File/test universes the generator would use, for building rules by hand.
std::vector<std::string> synth_file_paths(const SynthConfig& config);
std::vector<TestCase> synth_tests(const SynthConfig& config);

}  // namespace tsel
