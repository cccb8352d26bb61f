#pragma once

#include <string>
#include <vector>

namespace exknet::training {

enum class Split { Train, Dev, Test };

struct ManifestEntry {
  std::string id;
  std::string path;  // wav path, relative paths resolve against the manifest
  std::string speaker;
  Split split = Split::Train;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> select(Split split, const std::string& speaker = "") const;
  std::vector<std::string> speakers(Split split) const;
};

// JSON array of {id, path, speaker, split}. Ids must be unique and the
// referenced files must exist.
CorpusManifest load_manifest(const std::string& path);
void save_manifest(const CorpusManifest& manifest, const std::string& path);

Split parse_split(const std::string& name);
std::string split_name(Split split);

}  // namespace exknet::training
