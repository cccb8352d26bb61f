#include "train/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <json.hpp>
#include <set>

#include "io/atomic_file.hpp"
#include "util/error.hpp"

namespace exknet::training {

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  throw_format("manifest: unknown split '" + name + "'");
}

std::string split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

std::vector<const ManifestEntry*> CorpusManifest::select(Split split,
                                                         const std::string& speaker) const {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& e : entries) {
    if (e.split != split) continue;
    if (!speaker.empty() && e.speaker != speaker) continue;
    out.push_back(&e);
  }
  return out;
}

std::vector<std::string> CorpusManifest::speakers(Split split) const {
  std::set<std::string> uniq;
  for (const ManifestEntry& e : entries) {
    if (e.split == split) uniq.insert(e.speaker);
  }
  return {uniq.begin(), uniq.end()};
}

CorpusManifest load_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw_format("manifest " + path + ": " + e.what());
  }
  if (!j.is_array()) throw_format("manifest " + path + ": expected a JSON array");

  const fs::path base = fs::path(path).parent_path();
  CorpusManifest m;
  std::set<std::string> seen;
  for (const auto& item : j) {
    ManifestEntry e;
    try {
      e.id = item.at("id").get<std::string>();
      e.path = item.at("path").get<std::string>();
      e.speaker = item.at("speaker").get<std::string>();
      e.split = parse_split(item.at("split").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
      throw_format("manifest " + path + ": " + ex.what());
    }
    if (!seen.insert(e.id).second) {
      throw_format("manifest " + path + ": duplicate utterance id '" + e.id + "'");
    }
    fs::path p(e.path);
    if (p.is_relative()) p = base / p;
    e.path = p.string();
    if (!fs::exists(p)) {
      throw_io("manifest " + path + ": missing audio file " + e.path);
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const CorpusManifest& manifest, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ManifestEntry& e : manifest.entries) {
    arr.push_back({{"id", e.id}, {"path", e.path}, {"speaker", e.speaker}, {"split", split_name(e.split)}});
  }
  io::atomic_write(path, arr.dump(2) + "\n");
}

}  // namespace exknet::training
