// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/run_manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "futurefoul/error.hpp"
#include "futurefoul/hash.hpp"
#include "json.hpp"

namespace futurefoul {

namespace {

using nlohmann::ordered_json;

ordered_json pairs_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : pairs) j[k] = v;
  return j;
}

std::vector<std::pair<std::string, std::string>> pairs_from(const ordered_json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), it.value().get<std::string>());
  return out;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void finalize_run_manifest(RunManifest& m) {
  const std::filesystem::path out_dir(m.output);
  std::filesystem::create_directories(out_dir);
  m.input_hashes.clear();
  for (const auto& [role, path] : m.inputs) {
    m.input_hashes.emplace_back(role, content_hash(path, {kRunManifestName}));
  }
  m.output_hash = git_tree_hash(out_dir, {kRunManifestName});
  m.finished_at = utc_timestamp();

  ordered_json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config"] = pairs_json(m.config);
  j["inputs"] = pairs_json(m.inputs);
  j["input_hashes"] = pairs_json(m.input_hashes);
  j["output"] = m.output;
  j["output_hash"] = m.output_hash;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;

  const auto final_path = out_dir / kRunManifestName;
  const auto tmp = out_dir / (std::string(kRunManifestName) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << j.dump(2) << "\n";
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

RunManifest read_run_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kRunManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  try {
    const auto j = ordered_json::parse(in);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = pairs_from(j.at("config"));
    m.inputs = pairs_from(j.at("inputs"));
    m.input_hashes = pairs_from(j.at("input_hashes"));
    m.output = j.at("output").get<std::string>();
    m.output_hash = j.at("output_hash").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace futurefoul
