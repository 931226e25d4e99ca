#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tsel {

ConfusionMetrics confusion_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold) {
    if (scores.empty() || scores.size() != labels.size())
        throw UsageError("confusion_metrics: empty or mismatched inputs");
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool predicted = scores[i] >= threshold;
        bool actual = labels[i] == 1;
        if (predicted && actual) ++tp;
        else if (predicted) ++fp;
        else if (actual) ++fn;
        else ++tn;
    }
    ConfusionMetrics m;
    double total = tp + fp + fn + tn;
    m.accuracy = (tp + tn) / total;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    m.mcc = denom > 0 ? (tp * tn - fp * fn) / denom : 0.0;
    return m;
}

KMetrics k_metrics(const std::vector<std::vector<int>>& labels_per_cycle_ranked,
                   std::size_t k) {
    if (k < 1) throw UsageError("k_metrics: k must be >= 1");
    KMetrics avg;
    if (labels_per_cycle_ranked.empty()) return avg;
    for (const auto& labels : labels_per_cycle_ranked) {
        std::size_t cut = std::min(k, labels.size());
        double tp = 0, failures = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == 1) {
                ++failures;
                if (i < cut) ++tp;
            }
        }
        double p = cut > 0 ? tp / static_cast<double>(cut) : 0.0;
        double r = failures > 0 ? tp / failures : 0.0;
        double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        avg.precision_at_k += p;
        avg.recall_at_k += r;
        avg.f1_at_k += f1;
    }
    double n = static_cast<double>(labels_per_cycle_ranked.size());
    avg.precision_at_k /= n;
    avg.recall_at_k /= n;
    avg.f1_at_k /= n;
    return avg;
}

double apfd(const std::vector<int>& failure_rank_positions, int n_tests, int m_failures) {
    if (m_failures < 1) throw UsageError("no failures: APFD undefined");
    if (static_cast<int>(failure_rank_positions.size()) != m_failures)
        throw UsageError("apfd: position count does not match m");
    double sum = 0;
    for (int pos : failure_rank_positions) {
        if (pos < 1 || pos > n_tests) throw UsageError("apfd: rank position out of range");
        sum += pos;
    }
    double n = n_tests, m = m_failures;
    return 1.0 - sum / (n * m) + 1.0 / (2.0 * n);
}

double napfd(const std::vector<int>& ranked_labels, std::size_t selected_count) {
    const std::size_t k = ranked_labels.size();
    if (selected_count > k) throw UsageError("napfd: selected_count exceeds suite size");
    int m = 0;
    double tf_sum = 0;
    int detected = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (ranked_labels[i] != 1) continue;
        ++m;
        if (i < selected_count) {
            ++detected;
            tf_sum += static_cast<double>(i + 1);  // TF_i = 0 when not selected
        }
    }
    if (m == 0) throw UsageError("no failures: NAPFD undefined");
    double p = static_cast<double>(detected) / m;
    return p - tf_sum / (static_cast<double>(m) * k) + p / (2.0 * k);
}

std::vector<std::pair<double, double>> confidence_curve(const std::vector<int>& ranked_labels) {
    int m = static_cast<int>(std::count(ranked_labels.begin(), ranked_labels.end(), 1));
    if (m == 0) throw UsageError("no failures: confidence curve undefined");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(ranked_labels.size());
    double n = static_cast<double>(ranked_labels.size());
    int detected = 0;
    for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
        if (ranked_labels[i] == 1) ++detected;
        curve.emplace_back((i + 1) / n, static_cast<double>(detected) / m);
    }
    return curve;
}

std::vector<StrategyRow> compare_strategies(const std::vector<CycleOutcome>& cycles,
                                            std::size_t k, std::uint64_t seed,
                                            double fallback_duration_seconds) {
    std::mt19937_64 rng(seed);
    struct Acc {
        double selection_rate = 0, precision = 0, recall = 0, minutes = 0;
        int cycles = 0, cycles_with_failures = 0;
    };
    std::map<std::string, Acc> acc;

    for (const auto& cy : cycles) {
        const std::size_t n = cy.ranked_labels.size();
        if (n == 0) continue;
        int failures = static_cast<int>(
            std::count(cy.ranked_labels.begin(), cy.ranked_labels.end(), 1));

        auto duration = [&](std::size_t i) {
            double d = i < cy.ranked_durations.size() ? cy.ranked_durations[i] : 0.0;
            return d > 0 ? d : fallback_duration_seconds;
        };

        auto record = [&](const std::string& name, const std::vector<std::size_t>& picked) {
            auto& a = acc[name];
            int tp = 0;
            double secs = 0;
            for (std::size_t i : picked) {
                if (cy.ranked_labels[i] == 1) ++tp;
                secs += duration(i);
            }
            a.selection_rate += static_cast<double>(picked.size()) / n;
            if (!picked.empty()) a.precision += static_cast<double>(tp) / picked.size();
            if (failures > 0) {
                a.recall += static_cast<double>(tp) / failures;
                ++a.cycles_with_failures;
            }
            a.minutes += secs / 60.0;
            ++a.cycles;
        };

        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        record("all", all);

        std::vector<std::size_t> shuffled = all;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        shuffled.resize(std::min(k, n));
        record("random_k", shuffled);

        std::vector<std::size_t> top(std::min(k, n));
        std::iota(top.begin(), top.end(), 0);
        record("tts", top);
    }

    std::vector<StrategyRow> rows;
    for (const auto& name : {"all", "random_k", "tts"}) {
        auto it = acc.find(name);
        if (it == acc.end()) continue;
        const Acc& a = it->second;
        StrategyRow row;
        row.strategy = name;
        if (a.cycles > 0) {
            row.selection_rate = a.selection_rate / a.cycles;
            row.precision = a.precision / a.cycles;
            row.test_minutes = a.minutes / a.cycles;
        }
        if (a.cycles_with_failures > 0) row.recall = a.recall / a.cycles_with_failures;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tsel
