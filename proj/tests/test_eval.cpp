#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "eval.hpp"

using namespace tsel;

namespace {

// direct summation over an explicit ordering, kept deliberately naive
double apfd_brute(const std::vector<int>& ranked_labels) {
    double n = static_cast<double>(ranked_labels.size());
    double m = 0, sum = 0;
    for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
        if (ranked_labels[i] == 1) {
            m += 1;
            sum += static_cast<double>(i + 1);
        }
    }
    return 1.0 - sum / (n * m) + 1.0 / (2.0 * n);
}

double napfd_brute(const std::vector<int>& ranked_labels, std::size_t selected) {
    double k = static_cast<double>(ranked_labels.size());
    double m = 0, detected = 0, sum = 0;
    for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
        if (ranked_labels[i] != 1) continue;
        m += 1;
        if (i < selected) {
            detected += 1;
            sum += static_cast<double>(i + 1);
        }
    }
    double p = detected / m;
    return p - sum / (m * k) + p / (2.0 * k);
}

std::vector<int> positions_of_failures(const std::vector<int>& labels) {
    std::vector<int> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == 1) out.push_back(static_cast<int>(i + 1));
    return out;
}

}  // namespace

TEST_CASE("confusion_metrics arithmetic") {
    // TP=2, FP=1, FN=1, TN=6
    std::vector<double> scores{0.9, 0.8, 0.7, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    std::vector<int> labels{1, 1, 0, 1, 0, 0, 0, 0, 0, 0};
    auto m = confusion_metrics(scores, labels, 0.5);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(m.accuracy == doctest::Approx(0.8));
    CHECK(m.mcc > 0.0);
}

TEST_CASE("confusion_metrics conventions") {
    std::vector<double> perfect{0.9, 0.1};
    std::vector<int> labels{1, 0};
    auto m = confusion_metrics(perfect, labels);
    CHECK(m.accuracy == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
    CHECK(m.mcc == doctest::Approx(1.0));

    std::vector<double> all_neg{0.1, 0.1, 0.1};
    std::vector<int> mixed{1, 0, 1};
    auto z = confusion_metrics(all_neg, mixed);
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(z.mcc == 0.0);

    CHECK_THROWS_AS(confusion_metrics({}, {}), UsageError);
    CHECK_THROWS_AS(confusion_metrics({0.5}, {1, 0}), UsageError);
}

TEST_CASE("mcc sign symmetry") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> scores;
        std::vector<int> labels, flipped;
        for (int i = 0; i < 40; ++i) {
            scores.push_back(unit(rng));
            labels.push_back(unit(rng) < 0.4 ? 1 : 0);
            flipped.push_back(1 - labels.back());
        }
        double a = confusion_metrics(scores, labels).mcc;
        double b = confusion_metrics(scores, flipped).mcc;
        CHECK(a == doctest::Approx(-b).epsilon(1e-9));
    }
}

TEST_CASE("k_metrics counting") {
    std::vector<int> labels(100, 0);
    labels[3] = 1;
    labels[17] = 1;  // both failures inside top-50
    auto m = k_metrics({labels}, 50);
    CHECK(m.precision_at_k == doctest::Approx(0.04));
    CHECK(m.recall_at_k == doctest::Approx(1.0));

    std::vector<int> outside(100, 0);
    outside[80] = 1;
    CHECK(k_metrics({outside}, 50).recall_at_k == 0.0);

    CHECK(k_metrics({labels}, 500).recall_at_k == doctest::Approx(1.0));
    CHECK_THROWS_AS(k_metrics({labels}, 0), UsageError);

    // uniform average over cycles
    auto avg = k_metrics({labels, outside}, 50);
    CHECK(avg.recall_at_k == doctest::Approx(0.5));
}

TEST_CASE("apfd formula examples") {
    CHECK(apfd({1, 3}, 5, 2) == doctest::Approx(0.7));
    CHECK(apfd({1, 2}, 10, 2) == doctest::Approx(0.9));  // 1 - m/(2n) best case
    CHECK_THROWS_AS(apfd({}, 5, 0), UsageError);
    CHECK_THROWS_AS(apfd({6}, 5, 1), UsageError);
    CHECK_THROWS_AS(apfd({1}, 5, 2), UsageError);
}

TEST_CASE("apfd extremes via exhaustive permutations, n <= 6") {
    for (int n = 2; n <= 6; ++n) {
        for (int m = 1; m < n; ++m) {
            std::vector<int> labels(n, 0);
            std::fill(labels.begin(), labels.begin() + m, 1);
            std::sort(labels.begin(), labels.end());
            double best = -1, worst = 2;
            std::vector<int> best_labels, worst_labels;
            do {
                double v = apfd(positions_of_failures(labels), n, m);
                CHECK(v == doctest::Approx(apfd_brute(labels)).epsilon(1e-12));
                if (v > best) { best = v; best_labels = labels; }
                if (v < worst) { worst = v; worst_labels = labels; }
            } while (std::next_permutation(labels.begin(), labels.end()));
            // best ordering: all failures first; worst: all failures last
            for (int i = 0; i < m; ++i) {
                CHECK(best_labels[i] == 1);
                CHECK(worst_labels[n - 1 - i] == 1);
            }
        }
    }
}

TEST_CASE("napfd formula examples") {
    // k=4, m=2, select 2, one failure detected at rank 2
    CHECK(napfd({0, 1, 0, 1}, 2) == doctest::Approx(0.3125));
    // nothing selected
    CHECK(napfd({1, 0, 1, 0}, 0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(napfd({0, 0}, 1), UsageError);
    CHECK_THROWS_AS(napfd({1, 0}, 5), UsageError);
}

TEST_CASE("napfd equals apfd at full selection") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> len(1, 50), fail(0, 4);
    for (int round = 0; round < 1000; ++round) {
        int n = len(rng);
        std::vector<int> labels(n);
        int m = 0;
        for (auto& l : labels) m += (l = fail(rng) == 0 ? 1 : 0);
        if (m == 0) { labels[0] = 1; m = 1; }
        double full = napfd(labels, labels.size());
        double reference = apfd(positions_of_failures(labels), n, m);
        CHECK(full == doctest::Approx(reference).epsilon(1e-12));
        CHECK(full == doctest::Approx(napfd_brute(labels, labels.size())).epsilon(1e-12));
    }
}

TEST_CASE("napfd matches brute force and is monotone in selected_count") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> len(1, 50), fail(0, 3);
    for (int round = 0; round < 1000; ++round) {
        int n = len(rng);
        std::vector<int> labels(n);
        int m = 0;
        for (auto& l : labels) m += (l = fail(rng) == 0 ? 1 : 0);
        if (m == 0) { labels[rng() % n] = 1; m = 1; }
        double prev = -1;
        for (std::size_t sel = 0; sel <= labels.size(); ++sel) {
            double v = napfd(labels, sel);
            CHECK(v == doctest::Approx(napfd_brute(labels, sel)).epsilon(1e-9));
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("confidence_curve shapes") {
    std::vector<int> perfect(100, 0);
    for (int i = 0; i < 5; ++i) perfect[i] = 1;
    auto curve = confidence_curve(perfect);
    REQUIRE(curve.size() == 100);
    CHECK(curve[4].first == doctest::Approx(0.05));
    CHECK(curve[4].second == doctest::Approx(1.0));
    CHECK(curve.back().first == doctest::Approx(1.0));
    CHECK(curve.back().second == doctest::Approx(1.0));

    std::vector<int> reversed(100, 0);
    for (int i = 95; i < 100; ++i) reversed[i] = 1;
    auto worst = confidence_curve(reversed);
    CHECK(worst[94].second == doctest::Approx(0.0));
    CHECK(worst[95].second > 0.0);

    // y equals running recall at every prefix; monotone non-decreasing
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK(curve[i].second >= curve[i - 1].second);

    CHECK_THROWS_AS(confidence_curve(std::vector<int>(5, 0)), UsageError);
}

TEST_CASE("random ranking tracks the diagonal in expectation") {
    std::mt19937_64 rng(5);
    const int n = 50, m = 10, shuffles = 1000;
    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + m, 1);
    std::vector<double> mean_y(n, 0.0);
    for (int s = 0; s < shuffles; ++s) {
        std::shuffle(labels.begin(), labels.end(), rng);
        auto curve = confidence_curve(labels);
        for (int i = 0; i < n; ++i) mean_y[i] += curve[i].second;
    }
    double deviation = 0;
    for (int i = 0; i < n; ++i)
        deviation += std::abs(mean_y[i] / shuffles - (i + 1.0) / n);
    CHECK(deviation / n < 0.02);
}

TEST_CASE("compare_strategies baselines") {
    std::mt19937_64 rng(6);
    std::vector<CycleOutcome> cycles;
    for (int c = 0; c < 30; ++c) {
        CycleOutcome cy;
        for (int i = 0; i < 40; ++i) {
            cy.ranked_labels.push_back(i < 4 ? 1 : 0);  // model ranks failures first
            cy.ranked_durations.push_back(30.0);
        }
        cycles.push_back(std::move(cy));
    }
    auto rows = compare_strategies(cycles, 10, 42);
    REQUIRE(rows.size() == 3);

    auto find = [&](const std::string& name) {
        return *std::find_if(rows.begin(), rows.end(),
                             [&](const StrategyRow& r) { return r.strategy == name; });
    };
    auto all = find("all");
    CHECK(all.selection_rate == doctest::Approx(1.0));
    CHECK(all.recall == doctest::Approx(1.0));
    CHECK(all.test_minutes == doctest::Approx(40 * 30.0 / 60.0));

    auto tts = find("tts");
    CHECK(tts.selection_rate == doctest::Approx(0.25));
    CHECK(tts.recall == doctest::Approx(1.0));  // k=10 >= 4 failures, ranked first
    CHECK(tts.precision == doctest::Approx(0.4));

    auto rnd = find("random_k");
    CHECK(rnd.selection_rate == doctest::Approx(0.25));
    // E[recall] = k/n on uniform failures
    CHECK(rnd.recall == doctest::Approx(0.25).epsilon(0.35));
    CHECK(rnd.recall < all.recall);
}

TEST_CASE("compare_strategies uses the duration fallback") {
    CycleOutcome cy;
    cy.ranked_labels = {1, 0};
    cy.ranked_durations = {0.0, -1.0};  // unknown durations
    auto rows = compare_strategies({cy}, 2, 0, 60.0);
    auto all = std::find_if(rows.begin(), rows.end(),
                            [](const StrategyRow& r) { return r.strategy == "all"; });
    CHECK(all->test_minutes == doctest::Approx(2.0));
}
