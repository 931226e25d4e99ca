#include "model_io.hpp"

namespace tsel {

using nlohmann::json;

json model_to_json(const Model& model) {
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes) {
            if (n.is_leaf()) {
                nodes.push_back({{"leaf", n.leaf_value}});
            } else {
                nodes.push_back({{"f", n.feature},
                                 {"t", n.threshold},
                                 {"dl", n.default_left},
                                 {"l", n.left},
                                 {"r", n.right},
                                 {"g", n.gain}});
            }
        }
        trees.push_back(std::move(nodes));
    }
    return json{{"version", Model::kFormatVersion},
                {"base_logit", model.base_logit},
                {"n_features", model.n_features},
                {"vocab_fingerprint", model.vocab_fingerprint},
                {"config",
                 {{"n_trees", model.config.n_trees},
                  {"max_depth", model.config.max_depth},
                  {"learning_rate", model.config.learning_rate},
                  {"min_child_weight", model.config.min_child_weight},
                  {"l2_reg", model.config.l2_reg},
                  {"positive_class_weight", model.config.positive_class_weight},
                  {"seed", model.config.seed}}},
                {"round_losses", model.round_losses},
                {"trees", trees}};
}

Model model_from_json(const json& j) {
    try {
        if (!j.contains("version"))
            throw ModelError("model file: missing version field");
        if (j.at("version").get<int>() != Model::kFormatVersion)
            throw ModelError("model file: unsupported version");
        Model model;
        model.base_logit = j.at("base_logit").get<double>();
        model.n_features = j.at("n_features").get<int>();
        model.vocab_fingerprint = j.at("vocab_fingerprint").get<std::uint64_t>();
        const auto& c = j.at("config");
        model.config.n_trees = c.at("n_trees").get<int>();
        model.config.max_depth = c.at("max_depth").get<int>();
        model.config.learning_rate = c.at("learning_rate").get<double>();
        model.config.min_child_weight = c.at("min_child_weight").get<double>();
        model.config.l2_reg = c.at("l2_reg").get<double>();
        model.config.positive_class_weight = c.at("positive_class_weight").get<double>();
        model.config.seed = c.at("seed").get<std::uint64_t>();
        model.round_losses = j.value("round_losses", std::vector<double>{});
        for (const auto& tj : j.at("trees")) {
            Tree tree;
            for (const auto& nj : tj) {
                TreeNode n;
                if (nj.contains("leaf")) {
                    n.leaf_value = nj.at("leaf").get<double>();
                } else {
                    n.feature = nj.at("f").get<int>();
                    n.threshold = nj.at("t").get<double>();
                    n.default_left = nj.at("dl").get<bool>();
                    n.left = nj.at("l").get<int>();
                    n.right = nj.at("r").get<int>();
                    n.gain = nj.value("g", 0.0);
                }
                tree.nodes.push_back(n);
            }
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file: ") + e.what());
    }
}

json vocab_to_json(const FeatureVocabulary& vocab) {
    json files = json::array();
    for (const auto& [path, slot] : vocab.file_index)
        files.push_back({{"path", path}, {"slot", slot}});
    return json{{"files", files},
                {"extensions", vocab.extensions},
                {"missing_neighbor_distance", vocab.missing_neighbor_distance}};
}

FeatureVocabulary vocab_from_json(const json& j) {
    try {
        FeatureVocabulary vocab;
        for (const auto& f : j.at("files"))
            vocab.file_index.emplace(f.at("path").get<std::string>(), f.at("slot").get<int>());
        vocab.extensions = j.at("extensions").get<std::vector<std::string>>();
        vocab.missing_neighbor_distance = j.at("missing_neighbor_distance").get<double>();
        return vocab;
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file vocabulary: ") + e.what());
    }
}

}  // namespace tsel
