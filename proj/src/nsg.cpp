#include "nsgvd/nsg.hpp"

#include "nsgvd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace nsgvd {

LastFrameRule parse_last_frame_rule(const std::string& name) {
  if (name == "backward_difference") return LastFrameRule::kBackwardDifference;
  if (name == "drop_last") return LastFrameRule::kDropLast;
  throw ValidationError("unknown last-frame rule '" + name + "'");
}

std::string to_string(LastFrameRule rule) {
  return rule == LastFrameRule::kDropLast ? "drop_last" : "backward_difference";
}

void NsgConfig::validate() const {
  if (!(lambda_nsg > 0.0)) throw ValidationError("nsg lambda must be > 0");
  if (!(delta_t > 0.0)) throw ValidationError("nsg delta_t must be > 0");
  if (!(denominator_floor >= 0.0)) throw ValidationError("nsg denominator floor must be >= 0");
}

std::size_t NsgFeature::flagged_count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

NsgFeature NsgFeature::from_values(Matrix values) {
  NsgFeature f;
  const auto rows = static_cast<std::size_t>(values.rows());
  f.values = std::move(values);
  f.denominators.assign(rows, 1.0);
  f.flags.assign(rows, false);
  return f;
}

Vector GaussianOracleProvider::score(const VideoTensor& video, Eigen::Index frame) const {
  if (video.spatial_dim() != spec_.d) throw DataError("oracle provider dimension does not match video");
  return oracle_score(video.frame(frame).transpose(), spec_, static_cast<double>(frame + 1));
}

Vector TranslatingOracleProvider::score(const VideoTensor& video, Eigen::Index frame) const {
  if (video.spatial_dim() != spec_.d) throw DataError("oracle provider dimension does not match video");
  return translating_score(video.frame(frame).transpose(), spec_, static_cast<double>(frame + 1));
}

PrecomputedScoreProvider PrecomputedScoreProvider::from_file(const std::filesystem::path& path) {
  return PrecomputedScoreProvider(ScoreField(read_matrix(path)));
}

Vector PrecomputedScoreProvider::score(const VideoTensor& video, Eigen::Index frame) const {
  if (video.frame_count() != field_.frame_count() || video.spatial_dim() != field_.spatial_dim()) {
    throw DataError("score field shape " + std::to_string(field_.frame_count()) + "x" +
                    std::to_string(field_.spatial_dim()) + " does not match video " +
                    std::to_string(video.frame_count()) + "x" + std::to_string(video.spatial_dim()));
  }
  return field_.scores().row(frame).transpose();
}

std::optional<Vector> frame_displacement(const VideoTensor& video, Eigen::Index frame, LastFrameRule rule) {
  const Eigen::Index last = video.frame_count() - 1;
  if (frame < 0 || frame > last) throw ValidationError("frame index out of range");
  if (frame < last) return Vector(video.frame(frame + 1) - video.frame(frame));
  if (rule == LastFrameRule::kDropLast) return std::nullopt;
  return Vector(video.frame(last) - video.frame(last - 1));
}

double temporal_denominator(const Eigen::Ref<const Vector>& score, const Eigen::Ref<const Vector>& dx, double dt,
                            double lambda_nsg) {
  if (score.size() != dx.size()) throw ValidationError("score and displacement dimensions differ");
  return score.dot(dx) / dt + lambda_nsg;
}

NsgFeature nsg_from_displacements(const Matrix& scores, const Matrix& displacements, const NsgConfig& cfg) {
  cfg.validate();
  if (scores.rows() != displacements.rows() || scores.cols() != displacements.cols()) {
    throw DataError("scores and displacements have different shapes");
  }
  NsgFeature out;
  out.values.resize(scores.rows(), scores.cols());
  out.denominators.resize(static_cast<std::size_t>(scores.rows()));
  out.flags.resize(static_cast<std::size_t>(scores.rows()));

  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    const double denom =
        temporal_denominator(scores.row(t).transpose(), displacements.row(t).transpose(), cfg.delta_t, cfg.lambda_nsg);
    const bool flagged = std::abs(denom) < cfg.denominator_floor;
    // Flagged frames divide by the floor (sign kept) so values stay finite.
    double effective = denom;
    if (flagged) effective = std::copysign(cfg.denominator_floor, denom);
    if (effective == 0.0) throw DegenerateError("NSG denominator is exactly zero at frame " + std::to_string(t));
    out.values.row(t) = scores.row(t) / effective;
    out.denominators[i] = denom;
    out.flags[i] = flagged;
  }
  if (!out.values.allFinite()) throw DegenerateError("NSG feature has non-finite entries");
  if (scores.rows() > 0 && out.flagged_count() == static_cast<std::size_t>(scores.rows())) {
    throw DegenerateError("every frame has a near-degenerate NSG denominator");
  }
  return out;
}

NsgFeature nsg_feature(const VideoTensor& video, const ScoreProvider& provider, const NsgConfig& cfg) {
  cfg.validate();
  const Eigen::Index T = video.frame_count();
  const Eigen::Index kept = cfg.last_frame_rule == LastFrameRule::kDropLast ? T - 1 : T;
  Matrix scores(kept, video.spatial_dim());
  Matrix displacements(kept, video.spatial_dim());
  for (Eigen::Index t = 0; t < kept; ++t) {
    const Vector s = provider.score(video, t);
    if (s.size() != video.spatial_dim()) throw DataError("score provider returned a vector of the wrong size");
    if (!s.allFinite()) throw DataError("score provider returned non-finite values at frame " + std::to_string(t));
    scores.row(t) = s.transpose();
    displacements.row(t) = frame_displacement(video, t, cfg.last_frame_rule)->transpose();
  }
  return nsg_from_displacements(scores, displacements, cfg);
}

double near_lambda_fraction(std::span<const NsgFeature> features, double lambda_nsg, double band) {
  std::size_t total = 0;
  std::size_t near = 0;
  for (const auto& f : features) {
    for (double d : f.denominators) {
      ++total;
      if (std::abs(d - lambda_nsg) < band) ++near;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(near) / static_cast<double>(total);
}

std::filesystem::path sidecar_path(const std::filesystem::path& feature_path) {
  auto p = feature_path;
  p += ".json";
  return p;
}

void write_feature(const std::filesystem::path& path, const NsgFeature& feature) {
  write_matrix(path, feature.values);
  nlohmann::json j;
  j["denominators"] = feature.denominators;
  j["flags"] = feature.flags;
  j["flagged"] = feature.flagged_count();
  std::ofstream out(sidecar_path(path));
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write sidecar for '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

NsgFeature read_feature(const std::filesystem::path& path) {
  NsgFeature f = NsgFeature::from_values(read_matrix(path));
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    nlohmann::json j;
    try {
      in >> j;
      f.denominators = j.at("denominators").get<std::vector<double>>();
      f.flags = j.at("flags").get<std::vector<bool>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("bad feature sidecar '" + side.string() + "': " + e.what());
    }
    if (f.denominators.size() != static_cast<std::size_t>(f.values.rows()) || f.flags.size() != f.denominators.size()) {
      throw DataError("feature sidecar '" + side.string() + "' does not match the feature's frame count");
    }
  }
  return f;
}

}  // namespace nsgvd
