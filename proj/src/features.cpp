#include "features.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tsel {

namespace {

std::vector<std::string> dir_components(const std::string& path) {
    std::string dir = parent_directory(path);
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

constexpr std::int64_t kDay = 86400;

}  // namespace

int directory_distance(const std::string& path_a, const std::string& path_b) {
    auto a = dir_components(path_a);
    auto b = dir_components(path_b);
    std::size_t lca = 0;
    while (lca < a.size() && lca < b.size() && a[lca] == b[lca]) ++lca;
    return static_cast<int>((a.size() - lca) + (b.size() - lca));
}

FeatureVocabulary build_vocabulary(const std::vector<CommitRecord>& train_commits,
                                   const std::vector<TestCase>& tests,
                                   int min_extension_count) {
    FeatureVocabulary vocab;
    std::set<std::string> paths;
    for (const auto& c : train_commits)
        for (const auto& f : c.changes) paths.insert(f.path);
    int slot = 0;
    for (const auto& p : paths) vocab.file_index.emplace(p, slot++);

    std::map<std::string, int> ext_counts;
    for (const auto& p : paths) {
        auto ext = path_extension(p);
        if (!ext.empty()) ++ext_counts[ext];
    }
    for (const auto& [ext, count] : ext_counts)
        if (count >= min_extension_count) vocab.extensions.push_back(ext);

    // upper bound on any train-time directory distance, so the missing-
    // neighbor sentinel stays strictly above every real distance
    std::size_t max_file_depth = 0, max_test_depth = 0;
    for (const auto& p : paths)
        max_file_depth = std::max(max_file_depth, dir_components(p).size());
    for (const auto& t : tests)
        if (!t.test_path.empty())
            max_test_depth = std::max(max_test_depth, dir_components(t.test_path).size());
    vocab.missing_neighbor_distance =
        static_cast<double>(max_file_depth + max_test_depth + 1);
    return vocab;
}

FeatureExtractor::FeatureExtractor(const std::vector<CommitRecord>& commits,
                                   const std::vector<CICycle>& cycles)
    : commits_(&commits) {
    std::map<std::string, int> authors;
    int idx = 0;
    for (const auto& c : commits) {
        commit_index_.emplace(c.commit_id, idx);
        auto [it, inserted] = authors.emplace(c.author_id, static_cast<int>(authors.size()));
        for (const auto& f : c.changes)
            file_events_[f.path].push_back({c.timestamp, it->second, idx});
        ++idx;
    }
    for (auto& [path, ev] : file_events_)
        std::stable_sort(ev.begin(), ev.end(),
                         [](const FileEvent& a, const FileEvent& b) { return a.ts < b.ts; });

    std::vector<const CICycle*> sorted;
    sorted.reserve(cycles.size());
    for (const auto& cy : cycles) sorted.push_back(&cy);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CICycle* a, const CICycle* b) { return a->timestamp < b->timestamp; });
    for (const auto* cy : sorted) {
        cycle_ts_.push_back(cy->timestamp);
        for (const auto& v : cy->verdicts) {
            auto& h = test_history_[v.test_id];
            h.ts.push_back(v.timestamp);
            int prev = h.fail_prefix.empty() ? 0 : h.fail_prefix.back();
            h.fail_prefix.push_back(prev + (v.verdict == Verdict::failed ? 1 : 0));
        }
    }
    for (auto& [id, h] : test_history_) {
        // verdict timestamps must be non-decreasing for the window search
        for (std::size_t i = 1; i < h.ts.size(); ++i)
            if (h.ts[i] < h.ts[i - 1]) {
                std::vector<std::pair<std::int64_t, int>> pairs;
                for (std::size_t j = 0; j < h.ts.size(); ++j) {
                    int failed = h.fail_prefix[j] - (j ? h.fail_prefix[j - 1] : 0);
                    pairs.emplace_back(h.ts[j], failed);
                }
                std::stable_sort(pairs.begin(), pairs.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                for (std::size_t j = 0; j < pairs.size(); ++j) {
                    h.ts[j] = pairs[j].first;
                    h.fail_prefix[j] = (j ? h.fail_prefix[j - 1] : 0) + pairs[j].second;
                }
                break;
            }
    }
}

std::unordered_set<int> FeatureExtractor::commit_indices(
        const std::vector<std::string>& commit_ids) const {
    std::unordered_set<int> out;
    for (const auto& id : commit_ids) {
        auto it = commit_index_.find(id);
        if (it != commit_index_.end()) out.insert(it->second);
    }
    return out;
}

int FeatureExtractor::window_changes(const std::vector<FileEvent>& ev, std::int64_t as_of,
                                     int days, const std::unordered_set<int>* excluded) const {
    std::int64_t lo = as_of - kDay * days;
    auto begin = std::lower_bound(ev.begin(), ev.end(), lo,
                                  [](const FileEvent& e, std::int64_t t) { return e.ts < t; });
    auto end = std::lower_bound(ev.begin(), ev.end(), as_of,
                                [](const FileEvent& e, std::int64_t t) { return e.ts < t; });
    int count = static_cast<int>(end - begin);
    if (excluded && !excluded->empty())
        for (auto it = begin; it != end; ++it)
            if (excluded->count(it->commit)) --count;
    return count;
}

FileFeatureVector FeatureExtractor::file_features_impl(
        const std::string& path, std::int64_t as_of, const FileChange* current_change,
        const std::unordered_set<int>* excluded) const {
    FileFeatureVector out;
    auto it = file_events_.find(path);
    if (it != file_events_.end()) {
        const auto& ev = it->second;
        out.n_changes_3d = window_changes(ev, as_of, 3, excluded);
        out.n_changes_14d = window_changes(ev, as_of, 14, excluded);
        out.n_changes_56d = window_changes(ev, as_of, 56, excluded);
        std::int64_t lo = as_of - kDay * 56;
        std::set<int> distinct;
        for (const auto& e : ev) {
            if (e.ts < lo || e.ts >= as_of) continue;
            if (excluded && excluded->count(e.commit)) continue;
            distinct.insert(e.author);
        }
        out.n_distinct_authors = static_cast<double>(distinct.size());
    }
    if (current_change) {
        out.change_flag = 1.0;
        out.lines_added = static_cast<double>(current_change->lines_added);
        out.lines_deleted = static_cast<double>(current_change->lines_deleted);
        out.change_type_onehot[static_cast<int>(current_change->change_type)] = 1.0;
    }
    return out;
}

FileFeatureVector FeatureExtractor::file_features(const std::string& path, std::int64_t as_of,
                                                  const FileChange* current_change) const {
    return file_features_impl(path, as_of, current_change, nullptr);
}

TestFeatureVector FeatureExtractor::test_features(const std::string& test_id,
                                                  std::int64_t as_of) const {
    TestFeatureVector out;
    auto it = test_history_.find(test_id);
    if (it == test_history_.end()) return out;
    const auto& h = it->second;
    auto rate = [&](int days) -> double {
        std::int64_t lo = as_of - kDay * days;
        auto b = std::lower_bound(h.ts.begin(), h.ts.end(), lo) - h.ts.begin();
        auto e = std::lower_bound(h.ts.begin(), h.ts.end(), as_of) - h.ts.begin();
        if (e == b) return 0.0;
        int fails = h.fail_prefix[e - 1] - (b > 0 ? h.fail_prefix[b - 1] : 0);
        return static_cast<double>(fails) / static_cast<double>(e - b);
    };
    out.failure_rate_7d = rate(7);
    out.failure_rate_14d = rate(14);
    out.failure_rate_28d = rate(28);
    return out;
}

int FeatureExtractor::count_cycles_in_window(std::int64_t as_of, int window_days) const {
    std::int64_t lo = as_of - kDay * window_days;
    auto b = std::lower_bound(cycle_ts_.begin(), cycle_ts_.end(), lo);
    auto e = std::lower_bound(cycle_ts_.begin(), cycle_ts_.end(), as_of);
    return static_cast<int>(e - b);
}

std::pair<std::vector<std::string>, std::vector<std::string>>
FeatureExtractor::partition_impl(const std::vector<std::string>& changed_files,
                                 std::int64_t as_of, const KnownFileThresholds& thresholds,
                                 const std::unordered_set<int>* excluded) const {
    std::vector<std::string> sorted(changed_files);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    int n_cycles = count_cycles_in_window(as_of, 56);
    double max_changes = thresholds.max_change_fraction * n_cycles;

    std::vector<std::string> known, unknown;
    for (const auto& path : sorted) {
        int ch56 = 0;
        auto it = file_events_.find(path);
        if (it != file_events_.end()) ch56 = window_changes(it->second, as_of, 56, excluded);
        bool too_rare = ch56 < thresholds.min_changes_56d;
        bool too_hot = n_cycles > 0 && static_cast<double>(ch56) > max_changes;
        (too_rare || too_hot ? unknown : known).push_back(path);
    }
    return {std::move(known), std::move(unknown)};
}

std::pair<std::vector<std::string>, std::vector<std::string>>
FeatureExtractor::partition_known_files(const std::vector<std::string>& changed_files,
                                        std::int64_t as_of,
                                        const KnownFileThresholds& thresholds) const {
    return partition_impl(changed_files, as_of, thresholds, nullptr);
}

std::vector<CrossNeighbor> FeatureExtractor::cross_file_features(
        const TestCase& test, const std::vector<std::string>& known_changed_files,
        std::int64_t as_of) const {
    if (test.test_path.empty() || known_changed_files.empty()) return {};
    std::vector<CrossNeighbor> all;
    all.reserve(known_changed_files.size());
    for (const auto& path : known_changed_files) {
        CrossNeighbor n;
        n.path = path;
        n.distance = directory_distance(path, test.test_path);
        all.push_back(std::move(n));
    }
    std::sort(all.begin(), all.end(), [](const CrossNeighbor& a, const CrossNeighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.path < b.path;
    });
    if (all.size() > FeatureVocabulary::kNeighbors) all.resize(FeatureVocabulary::kNeighbors);
    FileChange changed_marker;  // standalone call: flag only, no line counts
    for (auto& n : all) {
        changed_marker.path = n.path;
        n.features = file_features_impl(n.path, as_of, &changed_marker, nullptr);
    }
    return all;
}

namespace {

void emit_file_vector(std::vector<std::pair<int, double>>& out, int base,
                      const FileFeatureVector& v) {
    auto push = [&](int off, double val) {
        if (val != 0.0) out.emplace_back(base + off, val);
    };
    push(0, v.change_flag);
    push(1, v.n_distinct_authors);
    push(2, v.lines_added);
    push(3, v.lines_deleted);
    for (int i = 0; i < 5; ++i) push(4 + i, v.change_type_onehot[i]);
    push(9, v.n_changes_3d);
    push(10, v.n_changes_14d);
    push(11, v.n_changes_56d);
}

}  // namespace

FeatureExtractor::ChangeContext FeatureExtractor::prepare_change(
        const ChangeSet& change, const FeatureVocabulary& vocab,
        const KnownFileThresholds& thresholds) const {
    ChangeContext ctx;
    ctx.id = change.id;
    ctx.as_of = change.timestamp;
    auto excluded = commit_indices(change.own_commit_ids);
    const auto* excl = excluded.empty() ? nullptr : &excluded;

    std::map<std::string, const FileChange*> by_path;
    for (const auto& f : change.files) by_path.emplace(f.path, &f);

    std::vector<std::string> paths;
    paths.reserve(by_path.size());
    for (const auto& [p, fc] : by_path) paths.push_back(p);
    auto [known, unknown] = partition_impl(paths, ctx.as_of, thresholds, excl);

    // files the vocabulary has never seen also land in the unknown aggregate
    std::vector<std::string> in_vocab;
    for (const auto& p : known) {
        if (vocab.file_index.count(p)) in_vocab.push_back(p);
        else unknown.push_back(p);
    }
    ctx.known_files = std::move(in_vocab);

    for (const auto& p : ctx.known_files) {
        auto fv = file_features_impl(p, ctx.as_of, by_path.at(p), excl);
        emit_file_vector(ctx.file_entries, vocab.file_block_offset(vocab.file_index.at(p)), fv);
        ctx.known_features.emplace(p, fv);
    }

    if (!unknown.empty()) {
        UnknownFilesAggregate agg;
        agg.n_filtered_files = static_cast<double>(unknown.size());
        for (const auto& p : unknown) {
            auto fv = file_features_impl(p, ctx.as_of, by_path.at(p), excl);
            agg.sum_lines_added += fv.lines_added;
            agg.sum_lines_deleted += fv.lines_deleted;
            agg.mean_changes_3d += fv.n_changes_3d;
            agg.mean_changes_14d += fv.n_changes_14d;
            agg.mean_changes_56d += fv.n_changes_56d;
        }
        agg.mean_changes_3d /= agg.n_filtered_files;
        agg.mean_changes_14d /= agg.n_filtered_files;
        agg.mean_changes_56d /= agg.n_filtered_files;
        int base = vocab.unknown_block_offset();
        auto push = [&](int off, double val) {
            if (val != 0.0) ctx.unknown_entries.emplace_back(base + off, val);
        };
        push(0, agg.n_filtered_files);
        push(1, agg.sum_lines_added);
        push(2, agg.sum_lines_deleted);
        push(3, agg.mean_changes_3d);
        push(4, agg.mean_changes_14d);
        push(5, agg.mean_changes_56d);
    }
    return ctx;
}

FeatureRow FeatureExtractor::row_for_test(const ChangeContext& ctx, const TestCase& test,
                                          const FeatureVocabulary& vocab) const {
    FeatureRow row;
    row.id = ctx.id;
    row.test_id = test.test_id;
    row.features = ctx.file_entries;

    auto tf = test_features(test.test_id, ctx.as_of);
    int tbase = vocab.test_block_offset();
    if (tf.failure_rate_7d != 0.0) row.features.emplace_back(tbase + 0, tf.failure_rate_7d);
    if (tf.failure_rate_14d != 0.0) row.features.emplace_back(tbase + 1, tf.failure_rate_14d);
    if (tf.failure_rate_28d != 0.0) row.features.emplace_back(tbase + 2, tf.failure_rate_28d);

    if (!test.test_path.empty() && !ctx.known_files.empty()) {
        std::vector<CrossNeighbor> neighbors;
        for (const auto& p : ctx.known_files) {
            CrossNeighbor n;
            n.path = p;
            n.distance = directory_distance(p, test.test_path);
            neighbors.push_back(std::move(n));
        }
        std::sort(neighbors.begin(), neighbors.end(),
                  [](const CrossNeighbor& a, const CrossNeighbor& b) {
                      if (a.distance != b.distance) return a.distance < b.distance;
                      return a.path < b.path;
                  });
        if (neighbors.size() > FeatureVocabulary::kNeighbors)
            neighbors.resize(FeatureVocabulary::kNeighbors);
        for (int i = 0; i < FeatureVocabulary::kNeighbors; ++i) {
            int base = vocab.cross_block_offset(i);
            int dist_off = FeatureVocabulary::kFileDims + vocab.extension_dims();
            if (i < static_cast<int>(neighbors.size())) {
                const auto& n = neighbors[i];
                emit_file_vector(row.features, base, ctx.known_features.at(n.path));
                int slot = vocab.extension_slot(path_extension(n.path));
                row.features.emplace_back(base + FeatureVocabulary::kFileDims + slot, 1.0);
                if (n.distance != 0)
                    row.features.emplace_back(base + dist_off, static_cast<double>(n.distance));
            } else {
                row.features.emplace_back(base + dist_off, vocab.missing_neighbor_distance);
            }
        }
    }

    for (const auto& e : ctx.unknown_entries) row.features.push_back(e);
    return row;
}

FeatureRow FeatureExtractor::build_row(const ChangeSet& change, const TestCase& test,
                                       const FeatureVocabulary& vocab,
                                       const KnownFileThresholds& thresholds) const {
    return row_for_test(prepare_change(change, vocab, thresholds), test, vocab);
}

ChangeSet FeatureExtractor::cycle_change_set(const CICycle& cycle) const {
    ChangeSet change;
    change.id = cycle.cycle_id;
    change.timestamp = cycle.timestamp;
    change.own_commit_ids = cycle.commit_ids;
    std::map<std::string, FileChange> merged;
    for (const auto& cid : cycle.commit_ids) {
        auto it = commit_index_.find(cid);
        if (it == commit_index_.end()) continue;
        for (const auto& f : (*commits_)[it->second].changes) {
            auto [mit, inserted] = merged.emplace(f.path, f);
            if (!inserted) {
                mit->second.lines_added += f.lines_added;
                mit->second.lines_deleted += f.lines_deleted;
                mit->second.change_type = f.change_type;
            }
        }
    }
    for (auto& [p, fc] : merged) change.files.push_back(std::move(fc));
    return change;
}

std::vector<FeatureRow> FeatureExtractor::build_training_matrix(
        const std::vector<CICycle>& cycles, const std::vector<TestCase>& tests,
        const FeatureVocabulary& vocab, const KnownFileThresholds& thresholds,
        bool drop_flagged) const {
    std::unordered_map<std::string, const TestCase*> by_id;
    for (const auto& t : tests) by_id.emplace(t.test_id, &t);
    std::vector<FeatureRow> rows;
    for (const auto& cy : cycles) {
        auto ctx = prepare_change(cycle_change_set(cy), vocab, thresholds);
        for (const auto& v : cy.verdicts) {
            if (drop_flagged && (v.flaky || v.broken)) continue;
            TestCase fallback{v.test_id, "", ""};
            auto it = by_id.find(v.test_id);
            const TestCase& t = it != by_id.end() ? *it->second : fallback;
            FeatureRow row = row_for_test(ctx, t, vocab);
            row.label = v.verdict == Verdict::failed ? 1 : 0;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace tsel
