#include "nsgvd/trainer.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string_view>

namespace nsgvd {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Draws batches without replacement; reshuffles when an epoch runs out.
class EpochSampler {
 public:
  EpochSampler(std::size_t size, std::uint64_t seed, std::string_view stream)
      : size_(size), seed_(seed), stream_(stream), order_(size) {
    shuffle();
  }

  std::vector<std::size_t> next(std::size_t n) {
    if (pos_ + n > size_) {
      ++epoch_;
      shuffle();
    }
    std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

 private:
  void shuffle() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng = Rng::derive(seed_, stream_, epoch_);
    for (std::size_t i = size_; i > 1; --i) std::swap(order_[i - 1], order_[rng.below(i)]);
    pos_ = 0;
  }

  std::size_t size_;
  std::uint64_t seed_;
  std::string_view stream_;
  std::vector<std::size_t> order_;
  std::uint64_t epoch_ = 0;
  std::size_t pos_ = 0;
};

std::vector<NsgFeature> gather(std::span<const NsgFeature> set, const std::vector<std::size_t>& idx) {
  std::vector<NsgFeature> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(set[i]);
  return out;
}

ObjectiveValue full_objective(std::span<const NsgFeature> real, std::span<const NsgFeature> fake,
                              const KernelParams& params, double lambda_reg) {
  const std::size_t m = std::min(real.size(), fake.size());
  return objective(real.first(m), fake.first(m), params, lambda_reg);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda_reg > 0.0)) throw ValidationError("train lambda_reg must be > 0");
  if (!(learning_rate > 0.0)) throw ValidationError("train learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ValidationError("train weight_decay must be >= 0");
  if (batch_size < 2) throw ValidationError("train batch_size must be >= 2");
}

TrainReport train_kernel(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const TrainConfig& cfg,
                         const KernelParams& init) {
  cfg.validate();
  if (real.size() < cfg.batch_size || fake.size() < cfg.batch_size) {
    throw DataError("training needs at least batch_size (" + std::to_string(cfg.batch_size) +
                    ") features per class; got " + std::to_string(real.size()) + " real and " +
                    std::to_string(fake.size()) + " fake");
  }

  TrainReport report;
  report.params = init;
  if (cfg.evaluate_full) report.initial_full = full_objective(real, fake, init, cfg.lambda_reg);
  if (cfg.max_iters == 0) {
    report.final_full = report.initial_full;
    return report;
  }

  EpochSampler real_batches(real.size(), cfg.seed, "train.batch.real");
  EpochSampler fake_batches(fake.size(), cfg.seed, "train.batch.fake");
  const std::vector<bool> decay_mask = init.weight_mask();
  Vector theta = init.pack();
  Vector m = Vector::Zero(theta.size());
  Vector v = Vector::Zero(theta.size());
  KernelParams params = init;

  for (std::size_t r = 1; r <= cfg.max_iters; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const auto xb = gather(real, real_batches.next(cfg.batch_size));
    const auto yb = gather(fake, fake_batches.next(cfg.batch_size));
    const ObjectiveGradient og = objective_with_gradient(xb, yb, params, cfg.lambda_reg);
    const Vector g = og.gradient.pack();
    if (!std::isfinite(og.value.objective) || !g.allFinite()) {
      report.aborted_at = r;
      report.abort_reason = !std::isfinite(og.value.objective) ? "non-finite objective" : "non-finite gradient";
      break;
    }

    // Ascent: the step follows +g.
    const double t = static_cast<double>(r);
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (decay_mask[static_cast<std::size_t>(i)]) theta(i) -= cfg.learning_rate * cfg.weight_decay * theta(i);
      theta(i) += cfg.learning_rate * (m(i) / c1) / (std::sqrt(v(i) / c2) + kAdamEps);
    }
    params.unpack(theta);

    TrainStep step;
    step.iteration = r;
    step.objective = og.value.objective;
    step.mpp = og.value.mpp;
    step.variance = og.value.variance;
    step.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.steps.push_back(step);
  }

  report.params = params;
  if (cfg.evaluate_full) report.final_full = full_objective(real, fake, params, cfg.lambda_reg);
  return report;
}

}  // namespace nsgvd
