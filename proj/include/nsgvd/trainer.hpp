#pragma once

// Kernel training: minibatch Adam ascent on J = MPP / sqrt(var + lambda_reg).

#include "nsgvd/mmd.hpp"

#include <optional>
#include <string>

namespace nsgvd {

struct TrainConfig {
  double lambda_reg = 1e-10;
  double learning_rate = 1e-4;
  double weight_decay = 0.1;
  std::size_t batch_size = 24;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
  /// Evaluate J on the full training sets before and after the loop.
  bool evaluate_full = true;

  void validate() const;
};

struct TrainStep {
  std::size_t iteration = 0;  ///< 1-based
  double objective = 0.0;
  double mpp = 0.0;
  double variance = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<TrainStep> steps;
  KernelParams params;
  std::optional<ObjectiveValue> initial_full;
  std::optional<ObjectiveValue> final_full;
  /// Set when a non-finite objective or gradient stopped the loop; params are
  /// then the last finite state.
  std::optional<std::size_t> aborted_at;
  std::string abort_reason;
};

/// Throws DataError when either population is smaller than the batch size.
TrainReport train_kernel(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const TrainConfig& cfg,
                         const KernelParams& init);

}  // namespace nsgvd
