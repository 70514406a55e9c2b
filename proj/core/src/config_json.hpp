// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "futurefoul/features.hpp"
#include "futurefoul/model.hpp"
#include "futurefoul/trainer.hpp"
#include "json.hpp"

namespace futurefoul {

nlohmann::ordered_json to_json(const FeatureConfig& c);
nlohmann::ordered_json to_json(const ModelConfig& c);
nlohmann::ordered_json to_json(const TrainConfig& c);

// Throw ConfigError on missing or mistyped keys.
FeatureConfig feature_config_from_json(const nlohmann::json& j);
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace futurefoul
