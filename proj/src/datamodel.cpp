#include "datamodel.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace tsel {

const char* to_string(ChangeType t) {
    switch (t) {
        case ChangeType::added: return "added";
        case ChangeType::modified: return "modified";
        case ChangeType::deleted: return "deleted";
        case ChangeType::renamed: return "renamed";
        case ChangeType::copied: return "copied";
    }
    return "modified";
}

ChangeType change_type_from_string(const std::string& s) {
    if (s == "added") return ChangeType::added;
    if (s == "modified") return ChangeType::modified;
    if (s == "deleted") return ChangeType::deleted;
    if (s == "renamed") return ChangeType::renamed;
    if (s == "copied") return ChangeType::copied;
    throw DataError("unknown change_type: " + s);
}

std::string normalize_path(std::string path) {
    std::replace(path.begin(), path.end(), '\\', '/');
    while (path.rfind("./", 0) == 0) path.erase(0, 2);
    // collapse "//"
    std::string out;
    out.reserve(path.size());
    for (char c : path) {
        if (c == '/' && !out.empty() && out.back() == '/') continue;
        out.push_back(c);
    }
    if (!out.empty() && out.front() == '/') out.erase(0, 1);
    return out;
}

double FeatureRow::value(int feature_id) const {
    auto it = std::lower_bound(features.begin(), features.end(), feature_id,
                               [](const auto& p, int id) { return p.first < id; });
    if (it != features.end() && it->first == feature_id) return it->second;
    return 0.0;
}

void FeatureRow::set(int feature_id, double v) {
    if (v == 0.0) return;
    auto it = std::lower_bound(features.begin(), features.end(), feature_id,
                               [](const auto& p, int id) { return p.first < id; });
    if (it != features.end() && it->first == feature_id) {
        it->second = v;
    } else {
        features.insert(it, {feature_id, v});
    }
}

int FeatureVocabulary::extension_slot(const std::string& ext) const {
    for (std::size_t i = 0; i < extensions.size(); ++i) {
        if (extensions[i] == ext) return static_cast<int>(i);
    }
    return static_cast<int>(extensions.size());  // "other" bucket
}

namespace {
void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
}
void fnv_mix(std::uint64_t& h, const std::string& s) {
    fnv_mix(h, s.data(), s.size());
    char sep = '\0';
    fnv_mix(h, &sep, 1);
}
}  // namespace

std::uint64_t FeatureVocabulary::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [path, slot] : file_index) {
        fnv_mix(h, path);
        fnv_mix(h, &slot, sizeof(slot));
    }
    for (const auto& e : extensions) fnv_mix(h, e);
    fnv_mix(h, &missing_neighbor_distance, sizeof(missing_neighbor_distance));
    return h;
}

std::size_t ValidationReport::count(ValidationIssue::Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(),
                      [kind](const ValidationIssue& i) { return i.kind == kind; }));
}

ValidationReport validate_history(const std::vector<CommitRecord>& commits,
                                  const std::vector<CICycle>& cycles,
                                  const std::vector<TestCase>& tests) {
    ValidationReport report;
    auto add = [&](ValidationIssue::Kind kind, std::string detail) {
        report.issues.push_back({kind, std::move(detail)});
    };

    std::unordered_set<std::string> commit_ids;
    std::int64_t prev_ts = INT64_MIN;
    for (const auto& c : commits) {
        if (!commit_ids.insert(c.commit_id).second)
            add(ValidationIssue::Kind::duplicate_commit_id, c.commit_id);
        if (c.timestamp < prev_ts)
            add(ValidationIssue::Kind::non_monotone_commit_timestamp, c.commit_id);
        prev_ts = c.timestamp;
        std::set<std::string> paths;
        for (const auto& f : c.changes) {
            if (!paths.insert(f.path).second)
                add(ValidationIssue::Kind::duplicate_path_in_commit,
                    c.commit_id + ": " + f.path);
        }
    }

    std::unordered_set<std::string> test_ids;
    for (const auto& t : tests) test_ids.insert(t.test_id);

    std::unordered_set<std::string> cycle_ids;
    prev_ts = INT64_MIN;
    for (const auto& cy : cycles) {
        if (!cycle_ids.insert(cy.cycle_id).second)
            add(ValidationIssue::Kind::duplicate_cycle_id, cy.cycle_id);
        if (cy.timestamp < prev_ts)
            add(ValidationIssue::Kind::non_monotone_cycle_timestamp, cy.cycle_id);
        prev_ts = cy.timestamp;
        for (const auto& id : cy.commit_ids) {
            if (!commit_ids.count(id))
                add(ValidationIssue::Kind::dangling_commit_reference,
                    cy.cycle_id + ": " + id);
        }
        std::set<std::string> seen;
        for (const auto& v : cy.verdicts) {
            if (!seen.insert(v.test_id).second)
                add(ValidationIssue::Kind::duplicate_verdict,
                    cy.cycle_id + ": " + v.test_id);
            if (!tests.empty() && !test_ids.count(v.test_id))
                add(ValidationIssue::Kind::unknown_test_reference,
                    cy.cycle_id + ": " + v.test_id);
        }
    }
    return report;
}

std::string path_extension(const std::string& path) {
    auto slash = path.find_last_of('/');
    auto base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string::npos || dot == 0) return "";
    std::string ext = base.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::string parent_directory(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

}  // namespace tsel
