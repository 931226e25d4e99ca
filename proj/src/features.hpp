#pragma once

#include <array>
#include <unordered_map>
#include <unordered_set>

#include "datamodel.hpp"

namespace tsel {

// Tree distance between the two files' directories:
// (depth(dir_a) - depth(lca)) + (depth(dir_b) - depth(lca)).
int directory_distance(const std::string& path_a, const std::string& path_b);

struct FileFeatureVector {
    double change_flag = 0;
    double n_distinct_authors = 0;
    double lines_added = 0;
    double lines_deleted = 0;
    std::array<double, 5> change_type_onehot{};  // added, modified, deleted, renamed, copied
    double n_changes_3d = 0;
    double n_changes_14d = 0;
    double n_changes_56d = 0;
};

struct TestFeatureVector {
    double failure_rate_7d = 0;
    double failure_rate_14d = 0;
    double failure_rate_28d = 0;
};

struct UnknownFilesAggregate {
    double n_filtered_files = 0;
    double sum_lines_added = 0;
    double sum_lines_deleted = 0;
    double mean_changes_3d = 0;
    double mean_changes_14d = 0;
    double mean_changes_56d = 0;
};

struct CrossNeighbor {
    std::string path;
    int distance = 0;
    FileFeatureVector features;
};

struct KnownFileThresholds {
    int min_changes_56d = 2;
    double max_change_fraction = 0.20;  // of cycles in the 56d window
};

// One change event to score: a commit, or a cycle's aggregated changes.
struct ChangeSet {
    std::string id;
    std::int64_t timestamp = 0;
    std::vector<FileChange> files;
    // history events belonging to this change (cycle's own commits); excluded
    // from windowed counts so the scored change never leaks into its features
    std::vector<std::string> own_commit_ids;
};

// file/test/cross-file extension vocabulary, built from training data only
FeatureVocabulary build_vocabulary(const std::vector<CommitRecord>& train_commits,
                                   const std::vector<TestCase>& tests,
                                   int min_extension_count = 10);

// Indexed view of immutable histories; all feature computation is windowed
// over [as_of - W, as_of), never touching events at or after as_of.
class FeatureExtractor {
public:
    FeatureExtractor(const std::vector<CommitRecord>& commits,
                     const std::vector<CICycle>& cycles);

    FileFeatureVector file_features(const std::string& path, std::int64_t as_of,
                                    const FileChange* current_change = nullptr) const;

    TestFeatureVector test_features(const std::string& test_id, std::int64_t as_of) const;

    std::pair<std::vector<std::string>, std::vector<std::string>>
    partition_known_files(const std::vector<std::string>& changed_files,
                          std::int64_t as_of,
                          const KnownFileThresholds& thresholds = {}) const;

    // at most 3 known changed files minimizing directory distance to the
    // test path, ties by lexicographic path; empty when test path is empty
    std::vector<CrossNeighbor> cross_file_features(const TestCase& test,
                                                   const std::vector<std::string>& known_changed_files,
                                                   std::int64_t as_of) const;

    FeatureRow build_row(const ChangeSet& change, const TestCase& test,
                         const FeatureVocabulary& vocab,
                         const KnownFileThresholds& thresholds = {}) const;

    // Per-change precomputation shared across all tests of that change.
    struct ChangeContext {
        std::string id;
        std::int64_t as_of = 0;
        std::vector<std::pair<int, double>> file_entries;     // BoW file blocks
        std::vector<std::pair<int, double>> unknown_entries;  // unknown-files aggregate
        std::vector<std::string> known_files;
        std::unordered_map<std::string, FileFeatureVector> known_features;
    };
    ChangeContext prepare_change(const ChangeSet& change, const FeatureVocabulary& vocab,
                                 const KnownFileThresholds& thresholds = {}) const;
    FeatureRow row_for_test(const ChangeContext& ctx, const TestCase& test,
                            const FeatureVocabulary& vocab) const;

    // one labeled row per (cycle, executed test); flaky/broken verdicts dropped
    std::vector<FeatureRow> build_training_matrix(const std::vector<CICycle>& cycles,
                                                  const std::vector<TestCase>& tests,
                                                  const FeatureVocabulary& vocab,
                                                  const KnownFileThresholds& thresholds = {},
                                                  bool drop_flagged = true) const;

    // union of the cycle's commits' file changes (adds/dels summed per path)
    ChangeSet cycle_change_set(const CICycle& cycle) const;

    int count_cycles_in_window(std::int64_t as_of, int window_days) const;

private:
    struct FileEvent {
        std::int64_t ts;
        int author;
        int commit;
    };
    struct TestHistory {
        std::vector<std::int64_t> ts;
        std::vector<int> fail_prefix;  // fail_prefix[i] = failures among first i verdicts
    };

    int window_changes(const std::vector<FileEvent>& ev, std::int64_t as_of, int days,
                       const std::unordered_set<int>* excluded) const;
    FileFeatureVector file_features_impl(const std::string& path, std::int64_t as_of,
                                         const FileChange* current_change,
                                         const std::unordered_set<int>* excluded) const;
    std::pair<std::vector<std::string>, std::vector<std::string>>
    partition_impl(const std::vector<std::string>& changed_files, std::int64_t as_of,
                   const KnownFileThresholds& thresholds,
                   const std::unordered_set<int>* excluded) const;
    std::unordered_set<int> commit_indices(const std::vector<std::string>& commit_ids) const;

    std::unordered_map<std::string, std::vector<FileEvent>> file_events_;
    std::unordered_map<std::string, TestHistory> test_history_;
    std::vector<std::int64_t> cycle_ts_;
    std::unordered_map<std::string, int> commit_index_;
    const std::vector<CommitRecord>* commits_;
};

}  // namespace tsel
