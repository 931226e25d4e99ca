#pragma once

#include <json.hpp>

#include "learner.hpp"

namespace tsel {

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

nlohmann::json vocab_to_json(const FeatureVocabulary& vocab);
FeatureVocabulary vocab_from_json(const nlohmann::json& j);

}  // namespace tsel
