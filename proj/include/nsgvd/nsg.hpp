#pragma once

// Normalized spatiotemporal gradient (NSG) features.
//
// For frame t with score s_t and displacement dx_t = x_{t+1} - x_t:
//
//   D_t = <s_t, dx_t> / dt + lambda        (estimate of -d/dt log p + lambda)
//   g_t = s_t / D_t
//
// The inner product runs over the d spatial entries, so each frame has one
// scalar denominator. Frame indices in this API are 0-based rows.

#include "nsgvd/synth.hpp"
#include "nsgvd/tensor.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nsgvd {

enum class LastFrameRule { kBackwardDifference, kDropLast };

LastFrameRule parse_last_frame_rule(const std::string& name);
std::string to_string(LastFrameRule rule);

struct NsgConfig {
  double lambda_nsg = 0.1;
  double delta_t = 1.0;
  LastFrameRule last_frame_rule = LastFrameRule::kBackwardDifference;
  double denominator_floor = 1e-6;

  void validate() const;
};

/// G(x): one NSG row per retained frame.
struct NsgFeature {
  Matrix values;                     ///< T' x d
  std::vector<double> denominators;  ///< D_t per retained frame
  std::vector<bool> flags;           ///< |D_t| < denominator_floor

  Eigen::Index frame_count() const noexcept { return values.rows(); }
  Eigen::Index spatial_dim() const noexcept { return values.cols(); }
  Eigen::Index flat_size() const noexcept { return values.size(); }
  /// Frame-major flattening (row 0 first).
  Eigen::Map<const Vector> flat() const { return {values.data(), values.size()}; }
  std::size_t flagged_count() const;

  /// Bare feature with the given values, unit denominators and no flags.
  static NsgFeature from_values(Matrix values);
};

/// Source of per-frame score vectors for a video.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual Vector score(const VideoTensor& video, Eigen::Index frame) const = 0;
};

/// Exact Gaussian score -x / sigma(t)^2 under the real-class density.
class GaussianOracleProvider final : public ScoreProvider {
 public:
  explicit GaussianOracleProvider(GaussianProcessSpec spec) : spec_(std::move(spec)) {}
  Vector score(const VideoTensor& video, Eigen::Index frame) const override;

 private:
  GaussianProcessSpec spec_;
};

/// Exact score of the translating density N(c t, sigma^2 I).
class TranslatingOracleProvider final : public ScoreProvider {
 public:
  explicit TranslatingOracleProvider(TranslatingDensitySpec spec) : spec_(std::move(spec)) {}
  Vector score(const VideoTensor& video, Eigen::Index frame) const override;

 private:
  TranslatingDensitySpec spec_;
};

/// Scores computed elsewhere (e.g. by an external diffusion model) and loaded
/// from an NSGT file. Read-only; safe for concurrent use.
class PrecomputedScoreProvider final : public ScoreProvider {
 public:
  explicit PrecomputedScoreProvider(ScoreField field) : field_(std::move(field)) {}
  static PrecomputedScoreProvider from_file(const std::filesystem::path& path);

  Vector score(const VideoTensor& video, Eigen::Index frame) const override;
  const ScoreField& field() const noexcept { return field_; }

 private:
  ScoreField field_;
};

/// x_{t+1} - x_t for t < T-1; at the last frame either the backward difference
/// or nullopt (drop).
std::optional<Vector> frame_displacement(const VideoTensor& video, Eigen::Index frame, LastFrameRule rule);

/// <score, dx> / dt + lambda
double temporal_denominator(const Eigen::Ref<const Vector>& score, const Eigen::Ref<const Vector>& dx, double dt,
                            double lambda_nsg);

/// Core estimator over explicit per-frame scores and displacements (same shape).
NsgFeature nsg_from_displacements(const Matrix& scores, const Matrix& displacements, const NsgConfig& cfg);

NsgFeature nsg_feature(const VideoTensor& video, const ScoreProvider& provider, const NsgConfig& cfg);

/// Fraction of stored denominators with |D - lambda| < band.
double near_lambda_fraction(std::span<const NsgFeature> features, double lambda_nsg, double band = 0.1);

/// Writes the values as a rank-2 NSGT file plus `<path>.json` with denominators and flags.
void write_feature(const std::filesystem::path& path, const NsgFeature& feature);
/// Reads a feature file; the sidecar is optional.
NsgFeature read_feature(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& feature_path);

}  // namespace nsgvd
