// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace futurefoul {

std::string sha1_hex(std::string_view data);

/// Object id git assigns to a blob with this content.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// Object id of the git tree for `dir` (regular files as mode 100644,
/// directories recursively). Entries whose name is in `exclude` are skipped
/// at every level, as are empty directories.
std::string git_tree_hash(const std::filesystem::path& dir, const std::set<std::string>& exclude = {});

/// Tree hash for a directory, blob hash for a file.
std::string content_hash(const std::filesystem::path& path, const std::set<std::string>& exclude = {});

}  // namespace futurefoul
