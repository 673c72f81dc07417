#pragma once

// Detection: Q = biased MMD of one test feature against the reference set,
// Fake iff Q > tau.

#include "nsgvd/mmd.hpp"

#include <optional>
#include <string>

namespace nsgvd {

inline constexpr double kDefaultTau = 1.0;
inline constexpr std::size_t kDefaultReferenceSize = 100;

enum class Decision { kReal, kFake };
std::string to_string(Decision d);

struct DetectionResult {
  double q = 0.0;
  Decision decision = Decision::kReal;
  std::size_t flagged_frames = 0;
};

/// Frozen kernel, reference features and threshold. Immutable after construction.
class DetectorState {
 public:
  DetectorState(std::vector<NsgFeature> reference, KernelParams params, double tau = kDefaultTau);

  const std::vector<NsgFeature>& reference() const noexcept { return reference_; }
  const KernelParams& params() const noexcept { return params_; }
  double tau() const noexcept { return tau_; }
  const ReferenceCache& cache() const noexcept { return cache_; }

 private:
  std::vector<NsgFeature> reference_;
  KernelParams params_;
  double tau_;
  ReferenceCache cache_;
};

DetectionResult detect_one(const NsgFeature& test, const DetectorState& state);

/// Elementwise detect_one. The first failing element (lowest index) is rethrown
/// with its index in the message.
std::vector<DetectionResult> detect_batch(std::span<const NsgFeature> tests, const DetectorState& state);

struct MetricsReport {
  double tau = kDefaultTau;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> auroc;
  std::string auroc_error;  ///< why auroc is missing
};

/// Threshold metrics at tau for Fake iff q > tau. is_fake[i] labels q[i].
/// A single-class input leaves auroc empty and sets auroc_error.
MetricsReport compute_metrics(std::span<const double> q, const std::vector<bool>& is_fake, double tau);

/// P(Q_fake > Q_real), ties 1/2. Throws ValidationError on single-class input.
double auroc(std::span<const double> q, const std::vector<bool>& is_fake);

std::vector<MetricsReport> threshold_sweep(std::span<const double> q, const std::vector<bool>& is_fake,
                                           std::span<const double> taus);

}  // namespace nsgvd
