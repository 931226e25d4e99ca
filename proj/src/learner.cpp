#include "learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsel {

double sigmoid(double x) {
    if (x >= 0) {
        double z = std::exp(-x);
        return 1.0 / (1.0 + z);
    }
    double z = std::exp(x);
    return z / (1.0 + z);
}

double Model::predict_logit(const FeatureRow& row) const {
    double logit = base_logit;
    for (const auto& tree : trees) {
        int node = 0;
        while (!tree.nodes[node].is_leaf()) {
            const TreeNode& n = tree.nodes[node];
            double v = row.value(n.feature);
            if (v == 0.0) node = n.default_left ? n.left : n.right;
            else node = v < n.threshold ? n.left : n.right;
        }
        logit += tree.nodes[node].leaf_value;
    }
    return logit;
}

// features beyond the trained range are legal: no tree references them, so
// they cannot alter the output (vocabulary mismatches are caught upstream
// by the fingerprint check)
double predict(const Model& model, const FeatureRow& row) {
    return sigmoid(model.predict_logit(row));
}

namespace {

struct ColumnEntry {
    double value;
    int row;
};

struct NodeStats {
    double g = 0, h = 0;
    int count = 0;
};

constexpr double kGainEps = 1e-12;

double leaf_objective(double g, double h, double l2) { return g * g / (h + l2); }

}  // namespace

Model fit(const std::vector<FeatureRow>& rows, const LearnerConfig& config,
          std::uint64_t vocab_fingerprint) {
    if (rows.empty()) throw ModelError("fit: no rows");
    const int n = static_cast<int>(rows.size());

    int n_features = 0;
    double sum_wp = 0, sum_wn = 0;
    std::vector<double> y(n), w(n);
    for (int i = 0; i < n; ++i) {
        if (!rows[i].label) throw ModelError("fit: unlabeled row");
        y[i] = *rows[i].label ? 1.0 : 0.0;
        w[i] = *rows[i].label ? config.positive_class_weight : 1.0;
        (*rows[i].label ? sum_wp : sum_wn) += w[i];
        for (const auto& [id, v] : rows[i].features) {
            if (!std::isfinite(v)) throw ModelError("fit: non-finite feature value");
            n_features = std::max(n_features, id + 1);
        }
    }
    if (sum_wp == 0.0 || sum_wn == 0.0) throw ModelError("fit: degenerate labels");

    Model model;
    model.config = config;
    model.vocab_fingerprint = vocab_fingerprint;
    model.n_features = n_features;
    model.base_logit = std::log(sum_wp / sum_wn);

    // column store: per feature, nonzero entries sorted by (value, row)
    std::vector<std::vector<ColumnEntry>> columns(n_features);
    for (int i = 0; i < n; ++i)
        for (const auto& [id, v] : rows[i].features)
            if (v != 0.0) columns[id].push_back({v, i});
    for (auto& col : columns)
        std::sort(col.begin(), col.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
            if (a.value != b.value) return a.value < b.value;
            return a.row < b.row;
        });

    std::vector<double> logits(n, model.base_logit);
    std::vector<double> grad(n), hess(n);
    std::vector<int> node_of(n);

    const double l2 = config.l2_reg;
    const double mcw = config.min_child_weight;

    for (int round = 0; round < config.n_trees; ++round) {
        for (int i = 0; i < n; ++i) {
            double p = sigmoid(logits[i]);
            grad[i] = w[i] * (p - y[i]);
            hess[i] = w[i] * p * (1.0 - p);
        }

        Tree tree;
        tree.nodes.emplace_back();
        std::vector<NodeStats> stats(1);
        for (int i = 0; i < n; ++i) {
            node_of[i] = 0;
            stats[0].g += grad[i];
            stats[0].h += hess[i];
            ++stats[0].count;
        }

        std::vector<int> frontier{0};
        for (int depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
            struct Best {
                double gain = 0;
                int feature = -1;
                double threshold = 0;
                bool default_left = true;
            };
            std::vector<Best> best(tree.nodes.size());
            std::vector<char> active(tree.nodes.size(), 0);
            for (int nid : frontier) active[nid] = 1;

            std::vector<double> gnz(tree.nodes.size()), hnz(tree.nodes.size());
            std::vector<int> cnz(tree.nodes.size());
            std::vector<double> gl(tree.nodes.size()), hl(tree.nodes.size());
            std::vector<int> cl(tree.nodes.size());
            std::vector<double> prev_val(tree.nodes.size());
            std::vector<char> seen(tree.nodes.size());

            for (int f = 0; f < n_features; ++f) {
                const auto& col = columns[f];
                if (col.empty()) continue;
                for (int nid : frontier) { gnz[nid] = hnz[nid] = 0; cnz[nid] = 0; }
                for (const auto& e : col) {
                    int nid = node_of[e.row];
                    if (!active[nid]) continue;
                    gnz[nid] += grad[e.row];
                    hnz[nid] += hess[e.row];
                    ++cnz[nid];
                }

                auto consider = [&](int nid, double threshold, double gl_nz, double hl_nz,
                                    int cl_nz) {
                    const NodeStats& s = stats[nid];
                    double gz = s.g - gnz[nid], hz = s.h - hnz[nid];
                    int cz = s.count - cnz[nid];
                    double parent = leaf_objective(s.g, s.h, l2);
                    // zeros to the left, then zeros to the right
                    for (int opt = 0; opt < 2; ++opt) {
                        bool zeros_left = opt == 0;
                        double GL = gl_nz + (zeros_left ? gz : 0.0);
                        double HL = hl_nz + (zeros_left ? hz : 0.0);
                        int CL = cl_nz + (zeros_left ? cz : 0);
                        double GR = s.g - GL, HR = s.h - HL;
                        int CR = s.count - CL;
                        if (CL <= 0 || CR <= 0) continue;
                        if (HL < mcw || HR < mcw) continue;
                        double gain = 0.5 * (leaf_objective(GL, HL, l2) +
                                             leaf_objective(GR, HR, l2) - parent);
                        if (gain > best[nid].gain + kGainEps) {
                            best[nid] = {gain, f, threshold, zeros_left};
                        }
                    }
                };

                for (int nid : frontier) {
                    gl[nid] = hl[nid] = 0;
                    cl[nid] = 0;
                    seen[nid] = 0;
                }
                for (const auto& e : col) {
                    int nid = node_of[e.row];
                    if (!active[nid]) continue;
                    if (!seen[nid]) {
                        // below the smallest nonzero value of this node
                        double t = e.value > 0 ? e.value / 2 : e.value - 0.5;
                        consider(nid, t, 0.0, 0.0, 0);
                        seen[nid] = 1;
                    } else if (e.value > prev_val[nid]) {
                        consider(nid, (prev_val[nid] + e.value) / 2, gl[nid], hl[nid], cl[nid]);
                    }
                    gl[nid] += grad[e.row];
                    hl[nid] += hess[e.row];
                    ++cl[nid];
                    prev_val[nid] = e.value;
                }
                for (int nid : frontier) {
                    if (!seen[nid]) continue;
                    // above the largest nonzero value: nonzeros left, zeros right
                    consider(nid, prev_val[nid] + 0.5, gl[nid], hl[nid], cl[nid]);
                }
            }

            std::vector<int> next_frontier;
            for (int nid : frontier) {
                if (best[nid].feature < 0 || best[nid].gain <= kGainEps) continue;
                int left = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                stats.emplace_back();
                stats.emplace_back();
                TreeNode& node = tree.nodes[nid];
                node.feature = best[nid].feature;
                node.threshold = best[nid].threshold;
                node.default_left = best[nid].default_left;
                node.gain = best[nid].gain;
                node.left = left;
                node.right = left + 1;
                next_frontier.push_back(node.left);
                next_frontier.push_back(node.right);
            }

            if (!next_frontier.empty()) {
                for (int i = 0; i < n; ++i) {
                    int nid = node_of[i];
                    const TreeNode& node = tree.nodes[nid];
                    if (node.is_leaf()) continue;
                    double v = rows[i].value(node.feature);
                    int child;
                    if (v == 0.0) child = node.default_left ? node.left : node.right;
                    else child = v < node.threshold ? node.left : node.right;
                    node_of[i] = child;
                    stats[child].g += grad[i];
                    stats[child].h += hess[i];
                    ++stats[child].count;
                }
            }
            frontier = std::move(next_frontier);
        }

        for (std::size_t nid = 0; nid < tree.nodes.size(); ++nid) {
            TreeNode& node = tree.nodes[nid];
            if (node.is_leaf())
                node.leaf_value = config.learning_rate * (-stats[nid].g / (stats[nid].h + l2));
        }

        for (int i = 0; i < n; ++i) {
            int node = 0;
            while (!tree.nodes[node].is_leaf()) {
                const TreeNode& nd = tree.nodes[node];
                double v = rows[i].value(nd.feature);
                if (v == 0.0) node = nd.default_left ? nd.left : nd.right;
                else node = v < nd.threshold ? nd.left : nd.right;
            }
            logits[i] += tree.nodes[node].leaf_value;
        }
        model.trees.push_back(std::move(tree));

        double loss = 0, wsum = 0;
        for (int i = 0; i < n; ++i) {
            double p = sigmoid(logits[i]);
            p = std::min(std::max(p, 1e-15), 1.0 - 1e-15);
            loss += w[i] * -(y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
            wsum += w[i];
        }
        model.round_losses.push_back(loss / wsum);
    }
    return model;
}

std::vector<LearnerConfig> default_tuning_grid(double base_failure_rate) {
    std::vector<LearnerConfig> grid;
    std::vector<double> weights{1.0};
    if (base_failure_rate > 0.0 && base_failure_rate < 0.5)
        weights.push_back(1.0 / base_failure_rate);
    for (int trees : {100, 200})
        for (int depth : {4, 6})
            for (double rate : {0.05, 0.1})
                for (double pw : weights) {
                    LearnerConfig c;
                    c.n_trees = trees;
                    c.max_depth = depth;
                    c.learning_rate = rate;
                    c.positive_class_weight = pw;
                    grid.push_back(c);
                }
    return grid;
}

TuneResult tune(const std::vector<FeatureRow>& train_rows,
                const std::vector<FeatureRow>& val_rows,
                const std::vector<LearnerConfig>& grid) {
    if (grid.empty()) throw UsageError("tune: empty grid");
    TuneResult result;
    bool have_best = false;
    for (const auto& config : grid) {
        Model m = fit(train_rows, config);
        int tp = 0, fp = 0, fn = 0;
        for (const auto& row : val_rows) {
            bool predicted = predict(m, row) >= 0.5;
            bool actual = row.label && *row.label == 1;
            if (predicted && actual) ++tp;
            else if (predicted && !actual) ++fp;
            else if (!predicted && actual) ++fn;
        }
        double f1 = (2 * tp + fp + fn) > 0 ? 2.0 * tp / (2 * tp + fp + fn) : 0.0;
        bool better = !have_best || f1 > result.best_f1 + 1e-12;
        if (!better && have_best && std::abs(f1 - result.best_f1) <= 1e-12) {
            if (config.n_trees < result.best_config.n_trees) better = true;
            else if (config.n_trees == result.best_config.n_trees &&
                     config.max_depth < result.best_config.max_depth)
                better = true;
        }
        if (better) {
            result.best_config = config;
            result.best_model = std::move(m);
            result.best_f1 = f1;
            have_best = true;
        }
    }
    return result;
}

std::map<int, double> feature_importance(const Model& model) {
    std::map<int, double> gains;
    for (const auto& tree : model.trees)
        for (const auto& node : tree.nodes)
            if (!node.is_leaf()) gains[node.feature] += node.gain;
    return gains;
}

}  // namespace tsel
