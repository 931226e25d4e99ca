#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "datamodel.hpp"

namespace tsel {

struct LearnerConfig {
    int n_trees = 200;
    int max_depth = 6;
    double learning_rate = 0.1;
    double min_child_weight = 0.0;
    double l2_reg = 1.0;
    double positive_class_weight = 1.0;
    std::uint64_t seed = 0;

    bool operator==(const LearnerConfig&) const = default;
};

// split: value < threshold goes left, >= goes right; zero/absent entries
// take the learned default direction instead
struct TreeNode {
    int feature = -1;  // -1 => leaf
    double threshold = 0.0;
    bool default_left = true;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;  // logit increment, learning rate applied
    double gain = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct Model {
    static constexpr int kFormatVersion = 1;

    std::vector<Tree> trees;
    double base_logit = 0.0;
    LearnerConfig config;
    std::uint64_t vocab_fingerprint = 0;
    int n_features = 0;
    std::vector<double> round_losses;  // weighted train BCE after each round

    double predict_logit(const FeatureRow& row) const;
};

// Boosted ensemble on the logistic loss; deterministic given (rows, config).
Model fit(const std::vector<FeatureRow>& rows, const LearnerConfig& config,
          std::uint64_t vocab_fingerprint = 0);

// sigmoid(base_logit + sum of leaf increments), strictly inside (0,1)
double predict(const Model& model, const FeatureRow& row);

struct TuneResult {
    LearnerConfig best_config;
    Model best_model;
    double best_f1 = 0.0;
};

// Fits each grid point on train, scores F1 on val at threshold 0.5;
// ties broken by fewer trees, then lower depth.
TuneResult tune(const std::vector<FeatureRow>& train_rows,
                const std::vector<FeatureRow>& val_rows,
                const std::vector<LearnerConfig>& grid);

std::vector<LearnerConfig> default_tuning_grid(double base_failure_rate);

// total split gain per feature; unsplit features absent
std::map<int, double> feature_importance(const Model& model);

double sigmoid(double x);

}  // namespace tsel
