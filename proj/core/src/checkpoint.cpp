// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "config_json.hpp"
#include "futurefoul/error.hpp"

namespace futurefoul {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr char kMagic[8] = {'F', 'F', 'C', 'K', 'P', 'T', '1', '\n'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

struct NamedTensor {
  std::string name;
  std::string kind;
  nn::Tensor<float>* tensor;
};

std::vector<NamedTensor> directory(FutureFoulNet<float>& model) {
  std::vector<NamedTensor> out;
  auto list = model.parameters();
  for (auto* p : list.params) out.push_back({p->name, "param", &p->value});
  for (auto* b : list.buffers) out.push_back({b->name, "buffer", &b->value});
  return out;
}

struct Loaded {
  CheckpointInfo info;
  json tensors;
  std::vector<double> data;
};

Loaded read_file(const std::filesystem::path& path, bool with_data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read checkpoint " + path.string());
  char magic[8];
  std::uint64_t header_size = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&header_size), sizeof(header_size));
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw Error(path.string() + " is not a checkpoint");
  if (header_size > (std::uint64_t{1} << 30)) throw Error(path.string() + ": corrupt header length");
  std::string header(header_size, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_size));
  if (!in) throw Error(path.string() + ": truncated header");
  Loaded out;
  try {
    const json j = json::parse(header);
    out.info.model = model_config_from_json(j.at("model"));
    out.info.features = feature_config_from_json(j.at("features"));
    out.info.seed = j.at("seed").get<std::uint64_t>();
    out.tensors = j.at("tensors");
  } catch (const json::exception& e) {
    throw Error(path.string() + ": bad header: " + e.what());
  }
  if (with_data) {
    std::size_t total = 0;
    for (const auto& t : out.tensors) total += t.at("size").get<std::size_t>();
    out.data.resize(total);
    in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw Error(path.string() + ": truncated tensor data");
  }
  return out;
}

void assign(const Loaded& loaded, FutureFoulNet<float>& model, const std::filesystem::path& path) {
  auto dir = directory(model);
  if (dir.size() != loaded.tensors.size()) throw ConfigError(path.string() + ": tensor count differs from the model");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    const auto& entry = loaded.tensors[i];
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (name != dir[i].name || shape != dir[i].tensor->shape) {
      throw ConfigError(path.string() + ": tensor " + name + " does not match model tensor " + dir[i].name);
    }
    auto& data = dir[i].tensor->data;
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = static_cast<float>(loaded.data[offset + k]);
    offset += data.size();
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, FutureFoulNet<float>& model, std::uint64_t seed) {
  auto dir = directory(model);
  ordered_json header;
  header["format"] = 1;
  header["model"] = to_json(model.model_config());
  header["features"] = to_json(model.feature_config());
  header["seed"] = seed;
  ordered_json tensors = ordered_json::array();
  for (const auto& t : dir) {
    ordered_json e;
    e["name"] = t.name;
    e["kind"] = t.kind;
    e["shape"] = t.tensor->shape;
    e["size"] = t.tensor->size();
    tensors.push_back(std::move(e));
  }
  header["tensors"] = std::move(tensors);
  const std::string text = header.dump();
  const std::uint64_t size = text.size();

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&size), sizeof(size));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::vector<double> buffer;
    for (const auto& t : dir) {
      buffer.assign(t.tensor->data.begin(), t.tensor->data.end());
      out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(double)));
    }
    if (!out) throw Error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path) { return read_file(path, false).info; }

FutureFoulNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointInfo* info) {
  const Loaded loaded = read_file(path, true);
  FutureFoulNet<float> model(loaded.info.model, loaded.info.features, loaded.info.seed);
  assign(loaded, model, path);
  if (info != nullptr) *info = loaded.info;
  return model;
}

void load_checkpoint_into(const std::filesystem::path& path, FutureFoulNet<float>& model) {
  const Loaded loaded = read_file(path, true);
  if (!(loaded.info.model == model.model_config())) {
    throw ConfigError(path.string() + ": model config differs from the target model");
  }
  if (!(loaded.info.features == model.feature_config())) {
    throw ConfigError(path.string() + ": feature config differs from the target model");
  }
  assign(loaded, model, path);
}

void check_feature_compatibility(const CheckpointInfo& info, const FeatureConfig& features) {
  if (!(info.features == features)) {
    throw ConfigError("samples were built with n_frames=" + std::to_string(features.n_frames) +
                      " global_size=" + std::to_string(features.global_size) +
                      " crop_size=" + std::to_string(features.crop_size) + " but the checkpoint expects n_frames=" +
                      std::to_string(info.features.n_frames) + " global_size=" +
                      std::to_string(info.features.global_size) + " crop_size=" +
                      std::to_string(info.features.crop_size));
  }
}

}  // namespace futurefoul
