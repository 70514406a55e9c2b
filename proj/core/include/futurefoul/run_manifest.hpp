// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace futurefoul {

inline constexpr const char* kRunManifestName = "run_manifest.json";

/// Provenance record written into every output directory.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // effective settings, in order
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // role, path
  std::vector<std::pair<std::string, std::string>> input_hashes;  // role, git-style hash
  std::string output;
  std::string output_hash;  // tree hash of the output directory without the manifest
  std::string started_at;   // UTC, ISO 8601
  std::string finished_at;
};

std::string utc_timestamp();

/// Hashes the inputs and the output directory, stamps finished_at and writes
/// `<output>/run_manifest.json` through a temporary file and a rename.
void finalize_run_manifest(RunManifest& manifest);

RunManifest read_run_manifest(const std::filesystem::path& dir);

}  // namespace futurefoul
