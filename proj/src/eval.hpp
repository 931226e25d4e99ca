#pragma once

#include <map>
#include <string>
#include <vector>

#include "datamodel.hpp"

namespace tsel {

struct ConfusionMetrics {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double mcc = 0;
};

// Standard definitions at the given threshold; zero denominators yield 0.
ConfusionMetrics confusion_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold = 0.5);

struct KMetrics {
    double precision_at_k = 0;
    double recall_at_k = 0;
    double f1_at_k = 0;
};

// Per cycle, the top-k ranked tests count as positive predictions; metrics
// are averaged uniformly over cycles.
KMetrics k_metrics(const std::vector<std::vector<int>>& labels_per_cycle_ranked,
                   std::size_t k);

// 1 - sum(TF_i)/(n*m) + 1/(2n), failure positions 1-based
double apfd(const std::vector<int>& failure_rank_positions, int n_tests, int m_failures);

// NAPFD = p - sum(TF_i)/(m*k) + p/(2k) with k = total tests and TF_i = 0
// for failures outside the selected prefix.
double napfd(const std::vector<int>& ranked_labels, std::size_t selected_count);

// one point per prefix length i: (i/n, detected_i/m)
std::vector<std::pair<double, double>> confidence_curve(const std::vector<int>& ranked_labels);

struct MetricReport {
    ConfusionMetrics classification;
    KMetrics k;
    double apfd = 0;
    double napfd = 0;
    std::vector<std::pair<double, double>> curve;
    std::map<std::string, double> wall_times;  // seconds per phase
};

struct StrategyRow {
    std::string strategy;
    double selection_rate = 0;
    double precision = 0;
    double recall = 0;
    double test_minutes = 0;
};

// One replayed cycle: tests in the model's rank order with their labels.
struct CycleOutcome {
    std::vector<int> ranked_labels;          // 1 = failed
    std::vector<double> ranked_durations;    // seconds; <=0 means unknown
};

// Strategies: "all", "random_k", "tts" (top-k of the given ranking).
std::vector<StrategyRow> compare_strategies(const std::vector<CycleOutcome>& cycles,
                                            std::size_t k, std::uint64_t seed,
                                            double fallback_duration_seconds = 60.0);

}  // namespace tsel
