#include "nsgvd/manifest.hpp"

#include "nsgvd/error.hpp"

#include <fstream>
#include <sstream>

namespace nsgvd {

std::string to_string(Label l) { return l == Label::kFake ? "fake" : "real"; }

Label parse_label(const std::string& s) {
  if (s == "real") return Label::kReal;
  if (s == "fake") return Label::kFake;
  throw DataError("unknown label '" + s + "' (expected real or fake)");
}

std::filesystem::path Manifest::resolve(const std::string& p) const {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (line.back() == '\t') fields.emplace_back();
    if (fields.size() < 2 || fields.size() > 5) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 2 to 5 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    fields.resize(5);
    ManifestRecord r;
    r.id = fields[0];
    if (r.id.empty()) throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty id");
    try {
      r.label = parse_label(fields[1]);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    r.video_path = fields[2];
    r.score_path = fields[3];
    r.feature_path = fields[4];
    m.records.push_back(std::move(r));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  for (const auto& r : records) {
    out << r.id << '\t' << to_string(r.label) << '\t' << r.video_path << '\t' << r.score_path << '\t'
        << r.feature_path << '\n';
  }
  if (!out) throw DataError("write failed for manifest '" + path.string() + "'");
}

}  // namespace nsgvd
