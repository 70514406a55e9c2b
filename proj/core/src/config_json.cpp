// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "config_json.hpp"

#include "futurefoul/error.hpp"

namespace futurefoul {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad ") + what + ": " + e.what());
  }
}

}  // namespace

ordered_json to_json(const FeatureConfig& c) {
  ordered_json j;
  j["n_frames"] = c.n_frames;
  j["global_size"] = c.global_size;
  j["crop_size"] = c.crop_size;
  return j;
}

ordered_json to_json(const ModelConfig& c) {
  ordered_json j;
  j["use_video"] = c.use_video;
  j["use_bbox"] = c.use_bbox;
  j["use_pose"] = c.use_pose;
  j["use_bboximg"] = c.use_bboximg;
  j["use_rnn"] = c.use_rnn;
  j["hidden"] = c.hidden;
  j["rnn_layers"] = c.rnn_layers;
  j["cnn_channels"] = c.cnn_channels;
  j["mlp_hidden"] = c.mlp_hidden;
  j["dropout_p"] = c.dropout_p;
  return j;
}

ordered_json to_json(const TrainConfig& c) {
  ordered_json j;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  return j;
}

FeatureConfig feature_config_from_json(const json& j) {
  return guarded("feature config", [&] {
    FeatureConfig c;
    c.n_frames = j.at("n_frames").get<int>();
    c.global_size = j.at("global_size").get<int>();
    c.crop_size = j.at("crop_size").get<int>();
    return c;
  });
}

ModelConfig model_config_from_json(const json& j) {
  return guarded("model config", [&] {
    ModelConfig c;
    c.use_video = j.at("use_video").get<bool>();
    c.use_bbox = j.at("use_bbox").get<bool>();
    c.use_pose = j.at("use_pose").get<bool>();
    c.use_bboximg = j.at("use_bboximg").get<bool>();
    c.use_rnn = j.at("use_rnn").get<bool>();
    c.hidden = j.at("hidden").get<int>();
    c.rnn_layers = j.at("rnn_layers").get<int>();
    c.cnn_channels = j.at("cnn_channels").get<std::array<int, 3>>();
    c.mlp_hidden = j.at("mlp_hidden").get<std::vector<int>>();
    c.dropout_p = j.at("dropout_p").get<double>();
    return c;
  });
}

TrainConfig train_config_from_json(const json& j) {
  return guarded("train config", [&] {
    TrainConfig c;
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  });
}

}  // namespace futurefoul
