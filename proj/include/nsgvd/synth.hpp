#pragma once

// Synthetic Gaussian video processes and their exact analytic quantities.
//
// Frame rows are 0-based in memory; the process time of row f is t = f + 1.
// All oracles evaluate the *real-class* density p(x, t) = N(0, sigma(t)^2 I),
// including when they are applied to fake-class samples.

#include "nsgvd/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsgvd {

/// sigma(t) together with its analytic derivative.
class SigmaSchedule {
 public:
  enum class Kind { kConstant, kLinear, kExponential };

  static SigmaSchedule constant(double value) { return {Kind::kConstant, value, 0.0}; }
  /// sigma(t) = a + b t
  static SigmaSchedule linear(double a, double b) { return {Kind::kLinear, a, b}; }
  /// sigma(t) = a exp(b t)
  static SigmaSchedule exponential(double a, double b) { return {Kind::kExponential, a, b}; }

  double sigma(double t) const;
  double sigma_dot(double t) const;

  Kind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  std::string name() const;
  static Kind parse_kind(const std::string& name);

 private:
  SigmaSchedule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

struct GaussianProcessSpec {
  Eigen::Index d = 16;
  Eigen::Index T = 8;
  Vector mu;  ///< empty or all-zero for the real class
  SigmaSchedule schedule = SigmaSchedule::constant(1.0);
  std::uint64_t seed = 0;

  /// Throws ValidationError on d, T < 1, a mu of the wrong size, or sigma(t) <= 0.
  void validate() const;
  bool is_real() const;
  /// mu, or the zero vector when mu is empty.
  Vector mean() const;
  /// phi = |mu|^2 / sigma(t)^2
  double noncentrality(double t) const;
};

struct TranslatingDensitySpec {
  Eigen::Index d = 1;
  Eigen::Index T = 8;
  double sigma = 1.0;
  Vector velocity;  ///< c, per unit frame time
  std::uint64_t seed = 0;

  void validate() const;
};

/// Frames drawn independently from N(mu, sigma(t)^2 I). Deterministic in spec.seed.
VideoTensor sample_video(const GaussianProcessSpec& spec);

/// One frame at process time t, drawn from the substream of `draw_index`.
Vector sample_frame(const GaussianProcessSpec& spec, double t, std::uint64_t draw_index);

/// grad_x log p(x, t) = -x / sigma(t)^2.
Vector oracle_score(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t);

/// The oracle score of every frame of `video`.
ScoreField oracle_score_field(const VideoTensor& video, const GaussianProcessSpec& spec);

/// d/dt log p(x, t) = -d sigma'/sigma + |x|^2 sigma'/sigma^3.
double oracle_temporal_derivative(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t);

/// lambda - d/dt log p(x, t), the exact NSG denominator.
double closed_form_denominator(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t,
                               double lambda_nsg);

/// Exact g(x, t) = -(x / sigma^2) / D(x). Throws DegenerateError when |D| < denominator_floor.
Vector closed_form_nsg(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t,
                       double lambda_nsg, double denominator_floor = 1e-12);

struct TranslatingSequence {
  VideoTensor video;
  std::vector<double> dlogp_dt;  ///< exact d/dt log p at each frame
};

/// x_1 ~ N(c, sigma^2 I), x_{t+1} = x_t + c. Density at time t is N(c t, sigma^2 I).
TranslatingSequence translating_sequence(const TranslatingDensitySpec& spec);

/// -(x - c t) / sigma^2
Vector translating_score(const Eigen::Ref<const Vector>& x, const TranslatingDensitySpec& spec, double t);

/// <c, x - c t> / sigma^2
double translating_temporal_derivative(const Eigen::Ref<const Vector>& x, const TranslatingDensitySpec& spec,
                                       double t);

}  // namespace nsgvd
