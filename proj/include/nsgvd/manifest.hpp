#pragma once

// Dataset manifest: one record per line, tab separated:
//   id  label(real|fake)  video_path  score_path  feature_path
// Empty fields are allowed. Relative paths are relative to the manifest's directory.

#include <filesystem>
#include <string>
#include <vector>

namespace nsgvd {

enum class Label { kReal, kFake };

std::string to_string(Label l);
Label parse_label(const std::string& s);

struct ManifestRecord {
  std::string id;
  Label label = Label::kReal;
  std::string video_path;
  std::string score_path;
  std::string feature_path;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRecord> records;

  /// base_dir / p for relative p; p itself otherwise. Empty stays empty.
  std::filesystem::path resolve(const std::string& p) const;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

}  // namespace nsgvd
