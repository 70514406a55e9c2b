// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/hash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <vector>

#include "futurefoul/error.hpp"

namespace futurefoul {

namespace {

using Digest = std::array<unsigned char, 20>;

Digest sha1(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  Digest out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw Error("SHA-1 computation failed");
  }
  return out;
}

std::string hex(const Digest& d) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (unsigned char c : d) {
    s += kDigits[c >> 4];
    s += kDigits[c & 15];
  }
  return s;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Digest blob_digest(std::string_view content) {
  std::string obj = "blob " + std::to_string(content.size());
  obj.push_back('\0');
  obj.append(content);
  return sha1(obj);
}

/// nullopt for a directory with no hashable content.
std::optional<Digest> tree_digest(const std::filesystem::path& dir, const std::set<std::string>& exclude) {
  struct Entry {
    std::string sort_key;
    std::string name;
    bool is_dir;
    Digest digest;
  };
  std::vector<Entry> entries;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (exclude.count(name) != 0) continue;
    if (e.is_directory()) {
      if (auto d = tree_digest(e.path(), exclude)) entries.push_back({name + "/", name, true, *d});
    } else if (e.is_regular_file()) {
      entries.push_back({name, name, false, blob_digest(read_all(e.path()))});
    }
  }
  if (entries.empty()) return std::nullopt;
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.sort_key < b.sort_key; });
  std::string body;
  for (const auto& e : entries) {
    body += e.is_dir ? "40000 " : "100644 ";
    body += e.name;
    body.push_back('\0');
    body.append(reinterpret_cast<const char*>(e.digest.data()), e.digest.size());
  }
  std::string obj = "tree " + std::to_string(body.size());
  obj.push_back('\0');
  obj += body;
  return sha1(obj);
}

}  // namespace

std::string sha1_hex(std::string_view data) { return hex(sha1(data)); }

std::string git_blob_hash(std::string_view content) { return hex(blob_digest(content)); }

std::string git_blob_hash_file(const std::filesystem::path& path) { return git_blob_hash(read_all(path)); }

std::string git_tree_hash(const std::filesystem::path& dir, const std::set<std::string>& exclude) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  if (auto d = tree_digest(dir, exclude)) return hex(*d);
  return "4b825dc642cb6eb9a060e54bf8d69288fbee4904";  // git's empty tree
}

std::string content_hash(const std::filesystem::path& path, const std::set<std::string>& exclude) {
  return std::filesystem::is_directory(path) ? git_tree_hash(path, exclude) : git_blob_hash_file(path);
}

}  // namespace futurefoul
