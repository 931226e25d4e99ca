#include <doctest.h>

#include <random>

#include "selector.hpp"

using namespace tsel;

namespace {

constexpr std::int64_t kDay = 86400;

struct SelectorFixture {
    std::vector<CommitRecord> commits;
    std::vector<CICycle> cycles;
    std::vector<TestCase> tests;
    FeatureVocabulary vocab;
    std::int64_t as_of = 200 * kDay;

    SelectorFixture() {
        for (int d = 1; d <= 56; ++d) {
            if (d <= 6) {
                CommitRecord c{"c" + std::to_string(d), as_of - d * kDay, "dev", {}};
                c.changes.push_back({"src/pay/F.kt", ChangeType::modified, 1, 1});
                commits.push_back(c);
            }
            CICycle cy{"n" + std::to_string(d), as_of - d * kDay, {}, {}};
            cy.verdicts.push_back({cy.cycle_id, "t1", cy.timestamp,
                                   d <= 6 ? Verdict::failed : Verdict::passed});
            cy.verdicts.push_back({cy.cycle_id, "t2", cy.timestamp, Verdict::passed});
            cycles.push_back(cy);
        }
        std::sort(commits.begin(), commits.end(),
                  [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
        tests = {{"t1", "src/pay/T1.kt", ""}, {"t2", "src/login/T2.kt", ""}};
        vocab = build_vocabulary(commits, tests, 1);
    }
};

}  // namespace

TEST_CASE("rank_tests orders ties by test_id under a constant model") {
    SelectorFixture fx;
    FeatureExtractor ex(fx.commits, fx.cycles);
    std::vector<FeatureRow> rows;
    FeatureRow pos, neg;
    pos.set(0, 1.0);
    pos.label = 1;
    neg.set(1, 1.0);
    neg.label = 0;
    LearnerConfig constant;
    constant.n_trees = 0;
    Model model = fit({pos, neg}, constant, fx.vocab.fingerprint());

    ChangeSet change{"chg", fx.as_of, {}, {}};
    std::vector<TestCase> tied{{"tb", "", ""}, {"ta", "", ""}, {"tc", "", ""}};
    auto ranked = rank_tests(model, change, tied, ex, fx.vocab);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].test_id == "ta");
    CHECK(ranked[1].test_id == "tb");
    CHECK(ranked[2].test_id == "tc");
    CHECK(ranked[0].score == ranked[2].score);

    CHECK(rank_tests(model, change, {}, ex, fx.vocab).empty());
}

TEST_CASE("rank_tests rejects a vocabulary fingerprint mismatch") {
    SelectorFixture fx;
    FeatureExtractor ex(fx.commits, fx.cycles);
    FeatureRow pos, neg;
    pos.set(0, 1.0);
    pos.label = 1;
    neg.label = 0;
    Model model = fit({pos, neg}, LearnerConfig{.n_trees = 0}, 12345);
    ChangeSet change{"chg", fx.as_of, {}, {}};
    CHECK_THROWS_AS(rank_tests(model, change, fx.tests, ex, fx.vocab), ModelError);
}

TEST_CASE("rank_tests surfaces the failure-prone test on trained data") {
    SelectorFixture fx;
    FeatureExtractor ex(fx.commits, fx.cycles);
    auto rows = ex.build_training_matrix(fx.cycles, fx.tests, fx.vocab);
    LearnerConfig config;
    config.n_trees = 50;
    config.max_depth = 3;
    Model model = fit(rows, config, fx.vocab.fingerprint());

    ChangeSet change{"chg", fx.as_of,
                     {{"src/pay/F.kt", ChangeType::modified, 3, 1}}, {}};
    auto ranked = rank_tests(model, change, fx.tests, ex, fx.vocab);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].test_id == "t1");
    CHECK(ranked[0].score > ranked[1].score);
}

TEST_CASE("latest_stability_flags takes each test's most recent verdict") {
    CICycle old{"n1", 100, {}, {{"n1", "t1", 100, Verdict::passed, {}, true, false}}};
    CICycle fresh{"n2", 200, {}, {{"n2", "t1", 200, Verdict::passed, {}, false, false},
                                  {"n2", "t2", 200, Verdict::passed, {}, false, true}}};
    auto flags = latest_stability_flags({old, fresh});
    CHECK_FALSE(flags.at("t1").unstable());
    CHECK(flags.at("t2").broken);
}

TEST_CASE("stability_filter removes flagged tests") {
    std::vector<TestCase> tests;
    for (int i = 0; i < 10; ++i) tests.push_back({"t" + std::to_string(i), "", ""});
    std::unordered_map<std::string, StabilityFlags> flags;
    flags["t3"] = {true, false};
    flags["t7"] = {false, true};
    auto out = stability_filter(tests, flags);
    CHECK(out.kept.size() == 8);
    CHECK(out.removed.size() == 2);
    CHECK(out.removed.at("t3") == FilterReason::unstable);
    CHECK(out.removed.at("t7") == FilterReason::unstable);

    auto none = stability_filter(tests, {});
    CHECK(none.kept.size() == 10);
    CHECK(none.removed.empty());
}

TEST_CASE("modular_filter keeps tests near changed modules") {
    std::vector<std::string> repo{
        "modA/build.gradle", "modA/src/F.kt", "modA/src/TA.kt",
        "modB/build.gradle.kts", "modB/src/TB.kt",
        "deep/nested/modC/build.gradle", "deep/nested/modC/TC.kt",
    };
    ModuleMap modules(repo);
    CHECK(modules.module_of("modA/src/F.kt") == "modA");
    CHECK(modules.module_of("modB/src/TB.kt") == "modB");
    CHECK(modules.module_of("orphan/X.kt") == "");

    std::vector<TestCase> tests{
        {"ta", "modA/src/TA.kt", ""},
        {"tb", "modB/src/TB.kt", ""},
        {"tc", "deep/nested/modC/TC.kt", ""},
        {"tu", "", ""},  // unplaceable
    };
    auto out = modular_filter(tests, {"modA/src/F.kt"}, modules, 1);
    // modA <-> modB distance 2, modA <-> modC distance 4
    CHECK(std::find(out.kept.begin(), out.kept.end(), "ta") != out.kept.end());
    CHECK(std::find(out.kept.begin(), out.kept.end(), "tu") != out.kept.end());
    CHECK(out.removed.at("tb") == FilterReason::wrong_module);
    CHECK(out.removed.at("tc") == FilterReason::wrong_module);

    auto wide = modular_filter(tests, {"modA/src/F.kt"}, modules, 2);
    CHECK(wide.removed.count("tb") == 0);
    CHECK(wide.removed.count("tc") == 1);
}

TEST_CASE("modular_filter without markers keeps everything") {
    ModuleMap modules({"src/A.kt", "src/B.kt"});
    CHECK_FALSE(modules.has_modules());
    std::vector<TestCase> tests{{"t1", "src/T.kt", ""}, {"t2", "far/T.kt", ""}};
    auto out = modular_filter(tests, {"src/A.kt"}, modules, 0);
    CHECK(out.kept.size() == 2);
    CHECK(out.removed.empty());
}

TEST_CASE("is_docs_only") {
    CHECK(is_docs_only({"README.md"}));
    CHECK(is_docs_only({"docs/a.md", "b.md"}));
    CHECK_FALSE(is_docs_only({"README.md", "config.yaml"}));
    CHECK_FALSE(is_docs_only({}));
    CHECK(is_docs_only({"a.rst", "b.md"}, {"md", "rst"}));
}

TEST_CASE("diff_language_from_string") {
    CHECK(diff_language_from_string("java") == DiffLanguage::java);
    CHECK(diff_language_from_string("kotlin") == DiffLanguage::kotlin);
    CHECK_THROWS_AS(diff_language_from_string("python"), UsageError);
}

TEST_CASE("comment-only diff detection") {
    auto comment_only = [](const std::string& diff) {
        return is_comment_only(diff, DiffLanguage::kotlin);
    };

    CHECK(comment_only(
        "@@ -1,2 +1,2 @@\n"
        "-// old note\n"
        "+// new note\n"
        " val x = 1\n"));

    CHECK_FALSE(comment_only(
        "@@ -1,1 +1,2 @@\n"
        " fun f() {}\n"
        "+val x = 1 // note\n"));

    // "//" inside a string literal: conservative, not comment-only
    CHECK_FALSE(comment_only(
        "@@ -1,1 +1,1 @@\n"
        "-val url = \"http://a\"\n"
        "+val url = \"http://b\"\n"));

    // block comment spanning several diff lines
    CHECK(comment_only(
        "@@ -1,3 +1,3 @@\n"
        "-/* old\n"
        "- * text\n"
        "- */\n"
        "+/* new\n"
        "+ * text\n"
        "+ */\n"));

    // changed line that closes a block and then has code
    CHECK_FALSE(comment_only(
        "@@ -1,2 +1,2 @@\n"
        "+/* note */ val x = 1\n"));

    // blank-only changes count as comment-only edits
    CHECK(comment_only(
        "@@ -1,1 +1,2 @@\n"
        " val x = 1\n"
        "+\n"
        "+   \n"));

    // no changed lines at all: nothing to waive
    CHECK_FALSE(comment_only(
        "@@ -1,1 +1,1 @@\n"
        " val x = 1\n"));
    CHECK_FALSE(comment_only(""));

    // file headers are ignored, not treated as removals
    CHECK(comment_only(
        "diff --git a/F.kt b/F.kt\n"
        "index abc..def 100644\n"
        "--- a/F.kt\n"
        "+++ b/F.kt\n"
        "@@ -1,1 +1,1 @@\n"
        "-// a\n"
        "+// b\n"));
}

TEST_CASE("select applies budget after filters") {
    std::vector<ScoredTest> ranked;
    for (int i = 0; i < 100; ++i)
        ranked.push_back({"t" + std::to_string(1000 + i), 1.0 - i * 0.01});

    auto all = select(ranked, 50, {});
    CHECK(all.selected.size() == 50);
    CHECK(all.selected.front().test_id == ranked.front().test_id);
    for (std::size_t i = 1; i < all.selected.size(); ++i)
        CHECK(all.selected[i - 1].score >= all.selected[i].score);

    std::map<std::string, FilterReason> filters;
    for (int i = 0; i < 60; ++i)
        filters.emplace("t" + std::to_string(1000 + i), FilterReason::unstable);
    auto filtered = select(ranked, 50, filters);
    CHECK(filtered.selected.size() == 40);
    for (const auto& st : filtered.selected) CHECK(filters.count(st.test_id) == 0);

    CHECK(select(ranked, 0, {}).selected.empty());
}

TEST_CASE("rank-monotone selection: better unfiltered tests are never skipped") {
    std::vector<ScoredTest> ranked{{"a", 0.9}, {"b", 0.8}, {"c", 0.7}, {"d", 0.6}};
    std::map<std::string, FilterReason> filters{{"b", FilterReason::unstable}};
    auto out = select(ranked, 2, filters);
    REQUIRE(out.selected.size() == 2);
    CHECK(out.selected[0].test_id == "a");
    CHECK(out.selected[1].test_id == "c");
}

TEST_CASE("filter composition is order-independent") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> coin(0, 1), mod(0, 3);
    for (int round = 0; round < 100; ++round) {
        std::vector<TestCase> tests;
        std::unordered_map<std::string, StabilityFlags> flags;
        std::vector<std::string> repo;
        for (int m = 0; m < 4; ++m) repo.push_back("m" + std::to_string(m) + "/build.gradle");
        for (int i = 0; i < 20; ++i) {
            std::string id = "t" + std::to_string(i);
            tests.push_back({id, "m" + std::to_string(mod(rng)) + "/T.kt", ""});
            if (coin(rng)) flags[id] = {coin(rng) == 1, coin(rng) == 1};
        }
        ModuleMap modules(repo);
        std::vector<std::string> changed{"m" + std::to_string(mod(rng)) + "/F.kt"};

        auto stab_first = stability_filter(tests, flags);
        std::vector<TestCase> surviving;
        for (const auto& id : stab_first.kept)
            for (const auto& t : tests)
                if (t.test_id == id) surviving.push_back(t);
        auto then_mod = modular_filter(surviving, changed, modules, 1);

        auto mod_first = modular_filter(tests, changed, modules, 1);
        std::vector<TestCase> surviving2;
        for (const auto& id : mod_first.kept)
            for (const auto& t : tests)
                if (t.test_id == id) surviving2.push_back(t);
        auto then_stab = stability_filter(surviving2, flags);

        CHECK(then_mod.kept == then_stab.kept);
    }
}
