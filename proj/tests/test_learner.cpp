#include <doctest.h>

#include <random>

#include "learner.hpp"
#include "model_io.hpp"

using namespace tsel;

namespace {

// label = 1 iff feature 7 is positive
std::vector<FeatureRow> separable_rows(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> noise_id(0, 6);
    std::vector<FeatureRow> rows;
    for (int i = 0; i < n; ++i) {
        FeatureRow r;
        r.id = "r" + std::to_string(i);
        r.test_id = "t";
        bool positive = unit(rng) < 0.4;
        if (positive) r.set(7, 0.5 + unit(rng));
        r.set(noise_id(rng), unit(rng));
        r.label = positive ? 1 : 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

double f1_at_half(const Model& model, const std::vector<FeatureRow>& rows) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& r : rows) {
        bool pred = predict(model, r) >= 0.5;
        if (pred && *r.label == 1) ++tp;
        else if (pred) ++fp;
        else if (*r.label == 1) ++fn;
    }
    double p = tp + fp > 0 ? tp / (tp + fp) : 0;
    double rec = tp + fn > 0 ? tp / (tp + fn) : 0;
    return p + rec > 0 ? 2 * p * rec / (p + rec) : 0;
}

}  // namespace

TEST_CASE("fit separates a linearly separable toy set") {
    auto rows = separable_rows(500, 1);
    Model model = fit(rows, LearnerConfig{});
    CHECK(f1_at_half(model, rows) == doctest::Approx(1.0));

    // AUC 1.0: every positive scores above every negative
    double min_pos = 1.0, max_neg = 0.0;
    for (const auto& r : rows) {
        double s = predict(model, r);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        if (*r.label == 1) min_pos = std::min(min_pos, s);
        else max_neg = std::max(max_neg, s);
    }
    CHECK(min_pos > max_neg);
}

TEST_CASE("n_trees=0 yields the weighted prior") {
    auto rows = separable_rows(200, 2);
    double positives = 0;
    for (const auto& r : rows) positives += *r.label;
    LearnerConfig config;
    config.n_trees = 0;
    Model model = fit(rows, config);
    CHECK(model.trees.empty());
    double expected = positives / static_cast<double>(rows.size());
    FeatureRow any;
    CHECK(predict(model, any) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
}

TEST_CASE("fit rejects degenerate inputs") {
    std::vector<FeatureRow> rows(4);
    for (auto& r : rows) {
        r.set(1, 1.0);
        r.label = 1;
    }
    CHECK_THROWS_AS(fit(rows, LearnerConfig{}), ModelError);

    rows[0].label.reset();
    CHECK_THROWS_AS(fit(rows, LearnerConfig{}), ModelError);

    auto ok = separable_rows(50, 3);
    ok[0].set(2, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(fit(ok, LearnerConfig{}), ModelError);
    CHECK_THROWS_AS(fit({}, LearnerConfig{}), ModelError);
}

TEST_CASE("training is deterministic: byte-identical serialized models") {
    auto rows = separable_rows(300, 4);
    LearnerConfig config;
    config.n_trees = 30;
    Model a = fit(rows, config, 99);
    Model b = fit(rows, config, 99);
    CHECK(model_to_json(a).dump() == model_to_json(b).dump());
}

TEST_CASE("per-round training loss is non-increasing") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> fid(0, 19);
    for (int ds = 0; ds < 20; ++ds) {
        std::vector<FeatureRow> rows;
        for (int i = 0; i < 120; ++i) {
            FeatureRow r;
            double signal = unit(rng);
            r.set(fid(rng), unit(rng));
            r.set(3, signal);
            r.label = (signal + 0.3 * unit(rng)) > 0.6 ? 1 : 0;
            rows.push_back(std::move(r));
        }
        bool has_pos = false, has_neg = false;
        for (const auto& r : rows) (*r.label ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) continue;
        LearnerConfig config;
        config.n_trees = 40;
        config.max_depth = 3;
        Model model = fit(rows, config);
        REQUIRE(model.round_losses.size() == 40);
        for (std::size_t i = 1; i < model.round_losses.size(); ++i)
            CHECK(model.round_losses[i] <= model.round_losses[i - 1] + 1e-12);
    }
}

TEST_CASE("explicit zero and absent entry predict identically") {
    auto rows = separable_rows(300, 5);
    Model model = fit(rows, LearnerConfig{});
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        FeatureRow sparse;
        if (unit(rng) < 0.5) sparse.set(7, unit(rng));
        sparse.set(static_cast<int>(unit(rng) * 7), unit(rng));
        FeatureRow padded = sparse;
        // re-inserting zeros must not change anything: set() drops them,
        // so splice one in manually to simulate a sloppy producer
        padded.features.insert(padded.features.begin(), {0, 0.0});
        if (padded.features.size() > 1 && padded.features[1].first == 0)
            padded.features.erase(padded.features.begin() + 1);
        CHECK(predict(model, sparse) == predict(model, padded));
    }
}

TEST_CASE("features beyond the trained range never change predictions") {
    auto rows = separable_rows(100, 7);
    Model model = fit(rows, LearnerConfig{});
    for (const auto& r : rows) {
        FeatureRow extended = r;
        extended.set(100000, 1.0);
        CHECK(predict(model, extended) == predict(model, r));
    }
}

TEST_CASE("model serialization round-trips and checks the version") {
    auto rows = separable_rows(200, 8);
    LearnerConfig config;
    config.n_trees = 25;
    config.positive_class_weight = 2.5;
    Model model = fit(rows, config, 1234);
    auto j = model_to_json(model);
    Model back = model_from_json(j);
    CHECK(back.base_logit == model.base_logit);
    CHECK(back.config == model.config);
    CHECK(back.vocab_fingerprint == model.vocab_fingerprint);
    for (const auto& r : rows)
        CHECK(predict(back, r) == predict(model, r));

    j.erase("version");
    CHECK_THROWS_AS(model_from_json(j), ModelError);
    auto j2 = model_to_json(model);
    j2["version"] = 999;
    CHECK_THROWS_AS(model_from_json(j2), ModelError);
}

TEST_CASE("tune picks the F1 argmax with deterministic tie-breaking") {
    auto train = separable_rows(400, 9);
    auto val = separable_rows(150, 10);

    LearnerConfig strong;  // enough capacity to solve the toy problem
    LearnerConfig weak;    // too little capacity to move off the prior
    weak.n_trees = 1;
    weak.max_depth = 1;
    weak.learning_rate = 0.001;
    auto result = tune(train, val, {weak, strong});
    CHECK(result.best_config == strong);
    CHECK(result.best_f1 == doctest::Approx(1.0));

    // single-entry grid returns that entry
    CHECK(tune(train, val, {weak}).best_config == weak);

    // identical F1 => fewer trees, then lower depth
    LearnerConfig big = strong;
    big.n_trees = 300;
    auto tied = tune(train, val, {big, strong});
    CHECK(tied.best_config.n_trees == strong.n_trees);

    LearnerConfig deep = strong;
    deep.max_depth = 8;
    auto tied2 = tune(train, val, {deep, strong});
    CHECK(tied2.best_config.max_depth == strong.max_depth);

    CHECK_THROWS_AS(tune(train, val, {}), UsageError);
}

TEST_CASE("default tuning grid covers the documented axes") {
    auto grid = default_tuning_grid(0.1);
    CHECK(grid.size() == 16);
    bool has_weighted = false;
    for (const auto& c : grid)
        if (c.positive_class_weight == doctest::Approx(10.0)) has_weighted = true;
    CHECK(has_weighted);
    CHECK(default_tuning_grid(0.5).size() == 8);
}

TEST_CASE("feature importance concentrates on the separating feature") {
    auto rows = separable_rows(500, 11);
    Model model = fit(rows, LearnerConfig{});
    auto importance = feature_importance(model);
    REQUIRE(importance.count(7) == 1);
    double total = 0;
    for (const auto& [id, gain] : importance) total += gain;
    CHECK(importance.at(7) / total >= 0.99);

    LearnerConfig constant;
    constant.n_trees = 0;
    CHECK(feature_importance(fit(rows, constant)).empty());
}

TEST_CASE("ranking is invariant under monotone score transforms") {
    auto rows = separable_rows(100, 12);
    Model model = fit(rows, LearnerConfig{});
    std::vector<std::pair<double, int>> by_score, by_logit;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        by_score.emplace_back(-predict(model, rows[i]), i);
        by_logit.emplace_back(-model.predict_logit(rows[i]), i);
    }
    std::stable_sort(by_score.begin(), by_score.end());
    std::stable_sort(by_logit.begin(), by_logit.end());
    for (std::size_t i = 0; i < by_score.size(); ++i)
        CHECK(by_score[i].second == by_logit[i].second);
}
