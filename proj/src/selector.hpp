#pragma once

#include <set>
#include <unordered_map>

#include "features.hpp"
#include "learner.hpp"

namespace tsel {

enum class FilterReason { unstable, wrong_module, docs_only_commit, comment_only_commit };

const char* to_string(FilterReason r);

struct ScoredTest {
    std::string test_id;
    double score = 0.0;
};

struct RankedSelection {
    std::vector<ScoredTest> selected;  // scores non-increasing, size <= budget
    std::size_t budget = 0;
    std::map<std::string, FilterReason> filtered_out;
};

// One row per test, scored and sorted by (score desc, test_id asc).
std::vector<ScoredTest> rank_tests(const Model& model, const ChangeSet& change,
                                   const std::vector<TestCase>& tests,
                                   const FeatureExtractor& extractor,
                                   const FeatureVocabulary& vocab,
                                   const KnownFileThresholds& thresholds = {});

struct StabilityFlags {
    bool flaky = false;
    bool broken = false;
    bool unstable() const { return flaky || broken; }
};

// flags from each test's most recent verdict window
std::unordered_map<std::string, StabilityFlags>
latest_stability_flags(const std::vector<CICycle>& cycles);

struct FilterOutcome {
    std::vector<std::string> kept;
    std::map<std::string, FilterReason> removed;
};

FilterOutcome stability_filter(const std::vector<TestCase>& tests,
                               const std::unordered_map<std::string, StabilityFlags>& latest_flags);

// Module of a path = deepest ancestor directory containing a marker file;
// paths without one belong to the root module. Tests are kept when their
// module is within dependency_hops tree hops of a changed-file module.
class ModuleMap {
public:
    ModuleMap(const std::vector<std::string>& repo_paths,
              const std::set<std::string>& marker_filenames = default_markers());

    static std::set<std::string> default_markers() {
        return {"build.gradle", "build.gradle.kts"};
    }

    std::string module_of(const std::string& path) const;
    bool has_modules() const { return !module_dirs_.empty(); }

private:
    std::set<std::string> module_dirs_;
};

FilterOutcome modular_filter(const std::vector<TestCase>& tests,
                             const std::vector<std::string>& changed_files,
                             const ModuleMap& modules, int dependency_hops = 1);

// true iff every changed path has a curated documentation extension
bool is_docs_only(const std::vector<std::string>& changed_paths,
                  const std::vector<std::string>& doc_extensions = {"md"});

enum class DiffLanguage { java, kotlin };

DiffLanguage diff_language_from_string(const std::string& s);

// Conservative: true only when every added/removed line of the unified diff
// is blank or provably comment text; any ambiguity returns false.
bool is_comment_only(const std::string& diff, DiffLanguage language);

RankedSelection select(const std::vector<ScoredTest>& ranked, std::size_t k,
                       std::map<std::string, FilterReason> filters_output);

}  // namespace tsel
