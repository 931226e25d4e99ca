#include "selector.hpp"

#include <algorithm>

namespace tsel {

const char* to_string(FilterReason r) {
    switch (r) {
        case FilterReason::unstable: return "unstable";
        case FilterReason::wrong_module: return "wrong_module";
        case FilterReason::docs_only_commit: return "docs_only_commit";
        case FilterReason::comment_only_commit: return "comment_only_commit";
    }
    return "unstable";
}

std::vector<ScoredTest> rank_tests(const Model& model, const ChangeSet& change,
                                   const std::vector<TestCase>& tests,
                                   const FeatureExtractor& extractor,
                                   const FeatureVocabulary& vocab,
                                   const KnownFileThresholds& thresholds) {
    if (model.vocab_fingerprint != vocab.fingerprint())
        throw ModelError("vocabulary fingerprint mismatch");
    auto ctx = extractor.prepare_change(change, vocab, thresholds);
    std::vector<ScoredTest> ranked;
    ranked.reserve(tests.size());
    for (const auto& t : tests) {
        FeatureRow row = extractor.row_for_test(ctx, t, vocab);
        ranked.push_back({t.test_id, predict(model, row)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredTest& a, const ScoredTest& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.test_id < b.test_id;
    });
    return ranked;
}

std::unordered_map<std::string, StabilityFlags>
latest_stability_flags(const std::vector<CICycle>& cycles) {
    std::unordered_map<std::string, StabilityFlags> flags;
    std::unordered_map<std::string, std::int64_t> latest_ts;
    for (const auto& cy : cycles) {
        for (const auto& v : cy.verdicts) {
            auto it = latest_ts.find(v.test_id);
            if (it == latest_ts.end() || v.timestamp >= it->second) {
                latest_ts[v.test_id] = v.timestamp;
                flags[v.test_id] = {v.flaky, v.broken};
            }
        }
    }
    return flags;
}

FilterOutcome stability_filter(
        const std::vector<TestCase>& tests,
        const std::unordered_map<std::string, StabilityFlags>& latest_flags) {
    FilterOutcome out;
    for (const auto& t : tests) {
        auto it = latest_flags.find(t.test_id);
        if (it != latest_flags.end() && it->second.unstable())
            out.removed.emplace(t.test_id, FilterReason::unstable);
        else
            out.kept.push_back(t.test_id);
    }
    return out;
}

namespace {

std::vector<std::string> split_dir(const std::string& dir) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dir) {
        if (c == '/') {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

int dir_tree_distance(const std::string& a, const std::string& b) {
    auto pa = split_dir(a), pb = split_dir(b);
    std::size_t lca = 0;
    while (lca < pa.size() && lca < pb.size() && pa[lca] == pb[lca]) ++lca;
    return static_cast<int>((pa.size() - lca) + (pb.size() - lca));
}

std::string basename_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

ModuleMap::ModuleMap(const std::vector<std::string>& repo_paths,
                     const std::set<std::string>& marker_filenames) {
    for (const auto& p : repo_paths)
        if (marker_filenames.count(basename_of(p)))
            module_dirs_.insert(parent_directory(p));
}

std::string ModuleMap::module_of(const std::string& path) const {
    std::string dir = parent_directory(path);
    while (true) {
        if (module_dirs_.count(dir)) return dir;
        if (dir.empty()) return "";  // root module
        auto slash = dir.find_last_of('/');
        dir = slash == std::string::npos ? std::string() : dir.substr(0, slash);
    }
}

FilterOutcome modular_filter(const std::vector<TestCase>& tests,
                             const std::vector<std::string>& changed_files,
                             const ModuleMap& modules, int dependency_hops) {
    FilterOutcome out;
    if (!modules.has_modules()) {  // single root module, nothing to exclude
        for (const auto& t : tests) out.kept.push_back(t.test_id);
        return out;
    }
    std::set<std::string> changed_modules;
    for (const auto& f : changed_files) changed_modules.insert(modules.module_of(f));
    for (const auto& t : tests) {
        const std::string& path = !t.test_path.empty() ? t.test_path : t.module_id;
        if (path.empty()) {  // unplaceable test: keep, never silently drop
            out.kept.push_back(t.test_id);
            continue;
        }
        std::string mod = !t.test_path.empty() ? modules.module_of(t.test_path) : t.module_id;
        bool near = false;
        for (const auto& cm : changed_modules)
            if (dir_tree_distance(mod, cm) <= dependency_hops) { near = true; break; }
        if (near) out.kept.push_back(t.test_id);
        else out.removed.emplace(t.test_id, FilterReason::wrong_module);
    }
    return out;
}

bool is_docs_only(const std::vector<std::string>& changed_paths,
                  const std::vector<std::string>& doc_extensions) {
    if (changed_paths.empty()) return false;
    for (const auto& p : changed_paths) {
        auto ext = path_extension(p);
        if (std::find(doc_extensions.begin(), doc_extensions.end(), ext) ==
            doc_extensions.end())
            return false;
    }
    return true;
}

DiffLanguage diff_language_from_string(const std::string& s) {
    if (s == "java") return DiffLanguage::java;
    if (s == "kotlin") return DiffLanguage::kotlin;
    throw UsageError("comment-only detection supports only java and kotlin, got: " + s);
}

namespace {

enum class LineClass { comment_only, code, ambiguous };

// Java/Kotlin share "//" and "/* */" comment syntax, which is all this
// scanner relies on.
LineClass classify_line(const std::string& content, bool& in_block) {
    bool code_seen = false;
    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n) {
        if (in_block) {
            auto pos = content.find("*/", i);
            if (pos == std::string::npos) return code_seen ? LineClass::code
                                                           : LineClass::comment_only;
            in_block = false;
            i = pos + 2;
            continue;
        }
        char c = content[i];
        if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
        if (c == '/' && i + 1 < n && content[i + 1] == '/')
            return code_seen ? LineClass::code : LineClass::comment_only;
        if (c == '/' && i + 1 < n && content[i + 1] == '*') {
            in_block = true;
            i += 2;
            continue;
        }
        if (c == '"' || c == '\'') return LineClass::ambiguous;
        code_seen = true;
        ++i;
    }
    return code_seen ? LineClass::code : LineClass::comment_only;
}

}  // namespace

bool is_comment_only(const std::string& diff, DiffLanguage language) {
    (void)language;  // both supported languages use the same comment grammar
    bool in_block = false;
    bool any_change = false;
    std::size_t start = 0;
    while (start <= diff.size()) {
        auto end = diff.find('\n', start);
        std::string line = diff.substr(start, end == std::string::npos ? std::string::npos
                                                                        : end - start);
        start = end == std::string::npos ? diff.size() + 1 : end + 1;
        if (line.empty()) continue;
        if (line.rfind("+++", 0) == 0 || line.rfind("---", 0) == 0 ||
            line.rfind("diff ", 0) == 0 || line.rfind("index ", 0) == 0 ||
            line.rfind("\\", 0) == 0)
            continue;
        if (line.rfind("@@", 0) == 0) {  // hunk boundary: block state unknown again
            in_block = false;
            continue;
        }
        char marker = line[0];
        if (marker != '+' && marker != '-' && marker != ' ') continue;
        bool changed = marker != ' ';
        if (changed) any_change = true;
        LineClass cls = classify_line(line.substr(1), in_block);
        if (cls == LineClass::ambiguous) return false;
        if (changed && cls != LineClass::comment_only) return false;
    }
    return any_change;
}

RankedSelection select(const std::vector<ScoredTest>& ranked, std::size_t k,
                       std::map<std::string, FilterReason> filters_output) {
    RankedSelection out;
    out.budget = k;
    out.filtered_out = std::move(filters_output);
    for (const auto& st : ranked) {
        if (out.selected.size() >= k) break;
        if (out.filtered_out.count(st.test_id)) continue;
        out.selected.push_back(st);
    }
    return out;
}

}  // namespace tsel
