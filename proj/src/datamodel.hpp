#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsel {

// Error categories mirror the process exit codes (1 usage, 2 data, 3 model).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ChangeType { added, modified, deleted, renamed, copied };

const char* to_string(ChangeType t);
ChangeType change_type_from_string(const std::string& s);

// Repository-relative path with "/" separators.
std::string normalize_path(std::string path);

struct FileChange {
    std::string path;
    ChangeType change_type = ChangeType::modified;
    std::int64_t lines_added = 0;
    std::int64_t lines_deleted = 0;

    bool operator==(const FileChange&) const = default;
};

struct CommitRecord {
    std::string commit_id;
    std::int64_t timestamp = 0;  // UTC epoch seconds
    std::string author_id;
    std::vector<FileChange> changes;

    bool operator==(const CommitRecord&) const = default;
};

struct TestCase {
    std::string test_id;
    std::string test_path;  // may be empty for public datasets
    std::string module_id;  // derived from build markers, optional

    bool operator==(const TestCase&) const = default;
};

enum class Verdict { passed, failed };

struct TestVerdict {
    std::string cycle_id;
    std::string test_id;
    std::int64_t timestamp = 0;
    Verdict verdict = Verdict::passed;
    std::optional<double> duration;  // seconds
    bool flaky = false;
    bool broken = false;

    bool operator==(const TestVerdict&) const = default;
};

struct CICycle {
    std::string cycle_id;
    std::int64_t timestamp = 0;
    std::vector<std::string> commit_ids;  // may be empty for public datasets
    std::vector<TestVerdict> verdicts;

    bool operator==(const CICycle&) const = default;
};

// Sparse (change, test) row. Features sorted by id, values finite.
struct FeatureRow {
    std::string id;       // cycle or commit id
    std::string test_id;
    std::vector<std::pair<int, double>> features;
    std::optional<int> label;  // present iff training/evaluation row

    double value(int feature_id) const;
    void set(int feature_id, double v);  // drops explicit zeros
};

// Fixed layout of the sparse row:
//   [file blocks: N x file_dims][test block][3 neighbor blocks][unknown block]
// Built once from the training history, then read-only.
struct FeatureVocabulary {
    static constexpr int kFileDims = 12;   // flag, authors, add, del, type one-hot(5), changes 3/14/56d
    static constexpr int kTestDims = 3;    // failure rate 7/14/28d
    static constexpr int kUnknownDims = 6; // count, sum add/del, mean changes 3/14/56d
    static constexpr int kNeighbors = 3;

    std::map<std::string, int> file_index;   // path -> slot in [0, N)
    std::vector<std::string> extensions;     // one-hot vocabulary; anything else -> "other"
    double missing_neighbor_distance = 1.0;  // sentinel for absent neighbors

    int n_files() const { return static_cast<int>(file_index.size()); }
    int extension_dims() const { return static_cast<int>(extensions.size()) + 1; }
    int neighbor_dims() const { return kFileDims + extension_dims() + 1; }

    int file_block_offset(int slot) const { return slot * kFileDims; }
    int test_block_offset() const { return n_files() * kFileDims; }
    int cross_block_offset(int neighbor) const {
        return test_block_offset() + kTestDims + neighbor * neighbor_dims();
    }
    int unknown_block_offset() const { return cross_block_offset(kNeighbors); }
    int total_dims() const { return unknown_block_offset() + kUnknownDims; }

    int extension_slot(const std::string& ext) const;

    std::uint64_t fingerprint() const;

    bool operator==(const FeatureVocabulary&) const = default;
};

struct ValidationIssue {
    enum class Kind {
        duplicate_commit_id,
        duplicate_cycle_id,
        duplicate_verdict,
        duplicate_path_in_commit,
        non_monotone_commit_timestamp,
        non_monotone_cycle_timestamp,
        dangling_commit_reference,
        unknown_test_reference,
    };
    Kind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::size_t count(ValidationIssue::Kind kind) const;
};

// Report-only: histories are never mutated. The test universe is optional;
// verdict test ids are only cross-checked when it is supplied.
ValidationReport validate_history(const std::vector<CommitRecord>& commits,
                                  const std::vector<CICycle>& cycles,
                                  const std::vector<TestCase>& tests = {});

std::string path_extension(const std::string& path);
std::string parent_directory(const std::string& path);

}  // namespace tsel
