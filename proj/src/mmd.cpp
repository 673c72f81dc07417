#include "nsgvd/mmd.hpp"

#include "nsgvd/error.hpp"

#include <cmath>

namespace nsgvd {
namespace {

void check_populations(std::span<const NsgFeature> real, std::span<const NsgFeature> fake) {
  if (real.size() != fake.size()) {
    throw ValidationError("real and fake populations must have equal size (" + std::to_string(real.size()) + " vs " +
                          std::to_string(fake.size()) + ")");
  }
  if (real.size() < 2) throw ValidationError("the multi-population statistic needs N >= 2");
}

}  // namespace

double mmd_biased_single(std::span<const NsgFeature> reference, const NsgFeature& test, const KernelParams& params) {
  return ReferenceCache(reference, params).statistic(test, params);
}

ReferenceCache::ReferenceCache(std::span<const NsgFeature> reference, const KernelParams& params) {
  if (reference.empty()) throw ValidationError("reference set is empty");
  rows_ = reference.front().values.rows();
  cols_ = reference.front().values.cols();
  const GramMatrix g = gram(reference, params);
  const double n = static_cast<double>(reference.size());
  reference_term_ = g.values.sum() / (n * n);
  embedded_ = embed_all(reference, params);
}

double ReferenceCache::statistic(const NsgFeature& test, const KernelParams& params) const {
  if (test.values.rows() != rows_ || test.values.cols() != cols_) {
    throw DataError("test feature shape " + std::to_string(test.values.rows()) + "x" +
                    std::to_string(test.values.cols()) + " does not match reference " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
  }
  const Embedded e = embed(test, params);
  double cross = 0.0;
  for (const auto& r : embedded_) cross += kernel_value(r, e, params);
  const double n = static_cast<double>(embedded_.size());
  return reference_term_ - 2.0 * cross / n + kernel_value(e, e, params);
}

Matrix h_star_from_grams(const Matrix& k_xx, const Matrix& k_xy) { return k_xx - k_xy - k_xy.transpose(); }

double mpp_from_h_star(const Matrix& h_star) {
  const double n = static_cast<double>(h_star.rows());
  return (h_star.sum() - h_star.trace()) / (n * (n - 1.0));
}

MppResult mpp_statistic(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const KernelParams& params) {
  check_populations(real, fake);
  MppResult r;
  r.h_star = h_star_from_grams(gram(real, params).values, gram(real, fake, params).values);
  r.mpp = mpp_from_h_star(r.h_star);
  return r;
}

double variance_estimator(const Matrix& h_star) {
  if (h_star.rows() != h_star.cols() || h_star.rows() < 2) throw ValidationError("H* must be square with N >= 2");
  const double n = static_cast<double>(h_star.rows());
  const Vector row_sums = h_star.rowwise().sum();
  const double total = row_sums.sum();
  return 4.0 / (n * n * n) * row_sums.squaredNorm() - 4.0 / (n * n * n * n) * total * total;
}

ObjectiveValue objective(std::span<const NsgFeature> real, std::span<const NsgFeature> fake, const KernelParams& params,
                         double lambda_reg) {
  if (!(lambda_reg > 0.0)) throw ValidationError("lambda_reg must be > 0");
  const MppResult m = mpp_statistic(real, fake, params);
  ObjectiveValue v;
  v.mpp = m.mpp;
  v.variance = variance_estimator(m.h_star);
  v.objective = v.mpp / std::sqrt(v.variance + lambda_reg);
  return v;
}

ObjectiveGradient objective_with_gradient(std::span<const NsgFeature> real, std::span<const NsgFeature> fake,
                                          const KernelParams& params, double lambda_reg) {
  if (!(lambda_reg > 0.0)) throw ValidationError("lambda_reg must be > 0");
  check_populations(real, fake);
  const Matrix k_xx = gram(real, params).values;
  const Matrix k_xy = gram(real, fake, params).values;
  const Matrix h = h_star_from_grams(k_xx, k_xy);
  const Eigen::Index N = h.rows();
  const double n = static_cast<double>(N);

  ObjectiveGradient out;
  out.value.mpp = mpp_from_h_star(h);
  out.value.variance = variance_estimator(h);
  const double v = out.value.variance + lambda_reg;
  const double root = std::sqrt(v);
  out.value.objective = out.value.mpp / root;

  // dJ/dH_ij = dMPP/dH_ij / sqrt(v) - MPP / (2 v^{3/2}) * dvar/dH_ij
  //   dMPP/dH_ij = [i != j] / (N (N - 1))
  //   dvar/dH_ij = 8/N^3 r_i - 8/N^4 S,  r_i = row sum, S = total
  const Vector row_sums = h.rowwise().sum();
  const double total = row_sums.sum();
  const double c_mpp = 1.0 / (n * (n - 1.0) * root);
  const double c_var = -out.value.mpp / (2.0 * v * root);
  Matrix dh(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double dvar = 8.0 / (n * n * n) * row_sums(i) - 8.0 / (n * n * n * n) * total;
    for (Eigen::Index j = 0; j < N; ++j) dh(i, j) = (i != j ? c_mpp : 0.0) + c_var * dvar;
  }

  // H = K_xx - K_xy - K_xy^T, so dJ/dK_xy = -(dh + dh^T).
  out.gradient = kernel_gradients(real, real, params, dh);
  const Matrix dk_xy = -(dh + dh.transpose());
  out.gradient += kernel_gradients(real, fake, params, dk_xy);
  return out;
}

}  // namespace nsgvd
