#pragma once

// Biased single-test MMD and the multi-population training objective.
//
//   Q = (1/n^2) sum_ij k(R_i, R_j) - (2/n) sum_i k(R_i, test) + k(test, test)
//
//   H_ij   = k(x_i, x_j) - k(x_i, y_j) - k(y_i, x_j)
//   MPP    = 1/(N(N-1)) sum_{i != j} H_ij
//   var    = 4/N^3 sum_i (sum_j H_ij)^2 - 4/N^4 (sum_ij H_ij)^2
//   J      = MPP / sqrt(var + lambda)

#include "nsgvd/deep_kernel.hpp"

#include <span>

namespace nsgvd {

double mmd_biased_single(std::span<const NsgFeature> reference, const NsgFeature& test, const KernelParams& params);

/// Reference-side cache: embeddings and the mean reference Gram term.
class ReferenceCache {
 public:
  ReferenceCache(std::span<const NsgFeature> reference, const KernelParams& params);

  /// Q for one test feature; reuses the cached reference term.
  double statistic(const NsgFeature& test, const KernelParams& params) const;

  double reference_term() const noexcept { return reference_term_; }
  std::size_t size() const noexcept { return embedded_.size(); }
  Eigen::Index frame_count() const noexcept { return rows_; }
  Eigen::Index spatial_dim() const noexcept { return cols_; }

 private:
  std::vector<Embedded> embedded_;
  double reference_term_ = 0.0;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
};

struct MppResult {
  double mpp = 0.0;
  Matrix h_star;
};

/// H* from the two Gram blocks K_xx and K_xy (K_yx = K_xy^T).
Matrix h_star_from_grams(const Matrix& k_xx, const Matrix& k_xy);

MppResult mpp_statistic(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const KernelParams& params);

double mpp_from_h_star(const Matrix& h_star);

double variance_estimator(const Matrix& h_star);

struct ObjectiveValue {
  double objective = 0.0;
  double mpp = 0.0;
  double variance = 0.0;
};

ObjectiveValue objective(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const KernelParams& params,
                         double lambda_reg);

struct ObjectiveGradient {
  ObjectiveValue value;
  KernelGradient gradient;  ///< d objective / d unconstrained params
};

ObjectiveGradient objective_with_gradient(std::span<const NsgFeature> real, std::span<const NsgFeature> fake,
                                          const KernelParams& params, double lambda_reg);

}  // namespace nsgvd
