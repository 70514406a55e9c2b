// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "futurefoul/features.hpp"
#include "futurefoul/model.hpp"

namespace futurefoul {

// Checkpoint layout: the 8-byte magic "FFCKPT1\n", a little-endian uint64
// header length, a JSON header (model config, feature config, seed, tensor
// directory), then every tensor as little-endian float64 in directory order.

struct CheckpointInfo {
  ModelConfig model;
  FeatureConfig features;
  std::uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, FutureFoulNet<float>& model, std::uint64_t seed);

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);

/// Builds a model from the stored configs and loads its tensors.
FutureFoulNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointInfo* info = nullptr);

/// Loads tensors into an existing model. Throws ConfigError when the stored
/// configs differ from the model's.
void load_checkpoint_into(const std::filesystem::path& path, FutureFoulNet<float>& model);

/// Throws ConfigError unless samples built with `features` fit the checkpoint.
void check_feature_compatibility(const CheckpointInfo& info, const FeatureConfig& features);

}  // namespace futurefoul
