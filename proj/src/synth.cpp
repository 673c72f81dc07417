#include "nsgvd/synth.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/rng.hpp"

#include <cmath>

namespace nsgvd {

double SigmaSchedule::sigma(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return a_;
    case Kind::kLinear:
      return a_ + b_ * t;
    case Kind::kExponential:
      return a_ * std::exp(b_ * t);
  }
  return a_;
}

double SigmaSchedule::sigma_dot(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kLinear:
      return b_;
    case Kind::kExponential:
      return a_ * b_ * std::exp(b_ * t);
  }
  return 0.0;
}

std::string SigmaSchedule::name() const {
  switch (kind_) {
    case Kind::kConstant:
      return "constant";
    case Kind::kLinear:
      return "linear";
    case Kind::kExponential:
      return "exponential";
  }
  return "constant";
}

SigmaSchedule::Kind SigmaSchedule::parse_kind(const std::string& name) {
  if (name == "constant") return Kind::kConstant;
  if (name == "linear") return Kind::kLinear;
  if (name == "exponential") return Kind::kExponential;
  throw ValidationError("unknown sigma schedule '" + name + "'");
}

void GaussianProcessSpec::validate() const {
  if (d < 1) throw ValidationError("spatial dimension d must be positive");
  if (T < 1) throw ValidationError("frame count T must be positive");
  if (mu.size() != 0 && mu.size() != d) throw ValidationError("mu must have d entries");
  if (mu.size() != 0 && !mu.allFinite()) throw ValidationError("mu must be finite");
  for (Eigen::Index t = 1; t <= T; ++t) {
    const double s = schedule.sigma(static_cast<double>(t));
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ValidationError("sigma(t) must be positive and finite at t=" + std::to_string(t));
    }
  }
}

bool GaussianProcessSpec::is_real() const { return mu.size() == 0 || (mu.array() == 0.0).all(); }

Vector GaussianProcessSpec::mean() const { return mu.size() == 0 ? Vector::Zero(d) : mu; }

double GaussianProcessSpec::noncentrality(double t) const {
  const double s = schedule.sigma(t);
  return mean().squaredNorm() / (s * s);
}

void TranslatingDensitySpec::validate() const {
  if (d < 1) throw ValidationError("spatial dimension d must be positive");
  if (T < 2) throw ValidationError("a translating sequence needs at least two frames");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (velocity.size() != d) throw ValidationError("velocity must have d entries");
}

Vector sample_frame(const GaussianProcessSpec& spec, double t, std::uint64_t draw_index) {
  Rng rng = Rng::derive(spec.seed, "synth.frame", draw_index);
  const double s = spec.schedule.sigma(t);
  Vector x(spec.d);
  for (Eigen::Index i = 0; i < spec.d; ++i) x(i) = s * rng.normal();
  return x + spec.mean();
}

VideoTensor sample_video(const GaussianProcessSpec& spec) {
  spec.validate();
  if (spec.T < 2) throw ValidationError("a video needs at least two frames");
  Rng rng = Rng::derive(spec.seed, "synth.video");
  const Vector mean = spec.mean();
  Matrix frames(spec.T, spec.d);
  for (Eigen::Index f = 0; f < spec.T; ++f) {
    const double s = spec.schedule.sigma(static_cast<double>(f + 1));
    for (Eigen::Index i = 0; i < spec.d; ++i) frames(f, i) = mean(i) + s * rng.normal();
  }
  return VideoTensor(std::move(frames));
}

Vector oracle_score(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t) {
  const double s = spec.schedule.sigma(t);
  return -x / (s * s);
}

ScoreField oracle_score_field(const VideoTensor& video, const GaussianProcessSpec& spec) {
  Matrix scores(video.frame_count(), video.spatial_dim());
  for (Eigen::Index f = 0; f < video.frame_count(); ++f) {
    const double s = spec.schedule.sigma(static_cast<double>(f + 1));
    scores.row(f) = -video.frame(f) / (s * s);
  }
  return ScoreField(std::move(scores));
}

double oracle_temporal_derivative(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t) {
  const double s = spec.schedule.sigma(t);
  const double sd = spec.schedule.sigma_dot(t);
  const double d = static_cast<double>(x.size());
  return -d * sd / s + x.squaredNorm() * sd / (s * s * s);
}

double closed_form_denominator(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t,
                               double lambda_nsg) {
  return lambda_nsg - oracle_temporal_derivative(x, spec, t);
}

Vector closed_form_nsg(const Eigen::Ref<const Vector>& x, const GaussianProcessSpec& spec, double t,
                       double lambda_nsg, double denominator_floor) {
  const double denom = closed_form_denominator(x, spec, t, lambda_nsg);
  if (std::abs(denom) < denominator_floor) {
    throw DegenerateError("closed-form NSG denominator " + std::to_string(denom) + " below floor");
  }
  const double s = spec.schedule.sigma(t);
  return (-x / (s * s)) / denom;
}

TranslatingSequence translating_sequence(const TranslatingDensitySpec& spec) {
  spec.validate();
  Rng rng = Rng::derive(spec.seed, "synth.translating");
  Matrix frames(spec.T, spec.d);
  for (Eigen::Index i = 0; i < spec.d; ++i) frames(0, i) = spec.velocity(i) + spec.sigma * rng.normal();
  for (Eigen::Index f = 1; f < spec.T; ++f) frames.row(f) = frames.row(f - 1) + spec.velocity.transpose();

  std::vector<double> dlogp(static_cast<std::size_t>(spec.T));
  for (Eigen::Index f = 0; f < spec.T; ++f) {
    dlogp[static_cast<std::size_t>(f)] =
        translating_temporal_derivative(frames.row(f).transpose(), spec, static_cast<double>(f + 1));
  }
  return {VideoTensor(std::move(frames)), std::move(dlogp)};
}

Vector translating_score(const Eigen::Ref<const Vector>& x, const TranslatingDensitySpec& spec, double t) {
  return -(x - spec.velocity * t) / (spec.sigma * spec.sigma);
}

double translating_temporal_derivative(const Eigen::Ref<const Vector>& x, const TranslatingDensitySpec& spec,
                                       double t) {
  return spec.velocity.dot(x - spec.velocity * t) / (spec.sigma * spec.sigma);
}

}  // namespace nsgvd
