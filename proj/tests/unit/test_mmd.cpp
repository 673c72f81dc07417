#include "nsgvd/error.hpp"
#include "nsgvd/mmd.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nsgvd;

namespace {

NsgFeature scalar_feature(double x) { return NsgFeature::from_values(Matrix::Constant(1, 1, x)); }

/// k reduces to exp(-(a-b)^2 / 2): eps -> 1 and sigma_Phi = 1.
KernelParams plain_gaussian() {
  DenseLayer layer{Eigen::MatrixXd::Ones(1, 1), Vector::Zero(1)};
  KernelParams p = KernelParams::make(FeatureNet({layer}), 0.5, 1.0, 1.0);
  p.epsilon_raw = 800.0;  // sigmoid == 1 in double
  return p;
}

}  // namespace

TEST(MmdSingle, IdenticalSingletonIsZero) {
  Rng r(1);
  const auto p = oracle::random_params(r, {6, 4, 3}, 2);
  const std::vector<NsgFeature> ref = {oracle::random_feature(r, 2, 3)};
  EXPECT_EQ(mmd_biased_single(ref, ref[0], p), 0.0);
}

TEST(MmdSingle, HandComputedScalarCase) {
  const auto p = plain_gaussian();
  ASSERT_EQ(p.epsilon(), 1.0);
  const std::vector<NsgFeature> ref = {scalar_feature(0.0), scalar_feature(2.0)};
  const double expected = (2.0 + 2.0 * std::exp(-2.0)) / 4.0 - 2.0 * std::exp(-0.5) + 1.0;
  EXPECT_NEAR(mmd_biased_single(ref, scalar_feature(1.0), p), expected, 1e-15);
  EXPECT_NEAR(expected, 0.35461, 1e-5);
}

TEST(MmdSingle, MatchesTripleLoopOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r(seed);
    const auto p = oracle::random_params(r, {6, 4, 3}, seed);
    const auto ref = oracle::random_features(r, 1 + r.below(5), 2, 3);
    const auto test = oracle::random_feature(r, 2, 3);
    const double q = mmd_biased_single(ref, test, p);
    EXPECT_NEAR(q, oracle::mmd_single(ref, test, p), 1e-12);
    EXPECT_GE(q, -1e-12);
  }
}

TEST(MmdSingle, CacheReusesReferenceTerm) {
  Rng r(2);
  const auto p = oracle::random_params(r, {6, 4, 3}, 2);
  const auto ref = oracle::random_features(r, 4, 2, 3);
  const ReferenceCache cache(ref, p);
  EXPECT_EQ(cache.size(), 4u);
  for (int k = 0; k < 5; ++k) {
    const auto t = oracle::random_feature(r, 2, 3);
    EXPECT_EQ(cache.statistic(t, p), mmd_biased_single(ref, t, p));
  }
  EXPECT_THROW(cache.statistic(oracle::random_feature(r, 3, 2), p), DataError);
  EXPECT_THROW(ReferenceCache({}, p), ValidationError);
}

TEST(Mpp, ConstantKernelGivesMinusC) {
  const double c = 0.3;
  const Matrix kxx = Matrix::Constant(4, 4, c), kxy = Matrix::Constant(4, 4, c);
  const Matrix h = h_star_from_grams(kxx, kxy);
  EXPECT_TRUE(h.isApprox(Matrix::Constant(4, 4, -c)));
  EXPECT_NEAR(mpp_from_h_star(h), -c, 1e-15);
}

TEST(Mpp, IdenticalPopulations) {
  Rng r(3);
  const auto p = oracle::random_params(r, {6, 4, 3}, 3);
  const auto x = oracle::random_features(r, 4, 2, 3);
  const auto m = mpp_statistic(x, x, p);
  const Matrix kxx = gram(x, p).values;
  EXPECT_TRUE(m.h_star.isApprox(-kxx, 1e-14));
  const double off = (kxx.sum() - kxx.trace()) / 12.0;
  EXPECT_NEAR(m.mpp, -off, 1e-14);
}

TEST(Mpp, TwoByTwoScripted) {
  Matrix kxx(2, 2), kxy(2, 2);
  kxx << 1.0, 0.6, 0.6, 1.0;
  kxy << 0.2, 0.3, 0.4, 0.5;
  // H01 = 0.6 - 0.3 - 0.4, H10 = 0.6 - 0.4 - 0.3
  EXPECT_NEAR(mpp_from_h_star(h_star_from_grams(kxx, kxy)), -0.1, 1e-15);
}

TEST(Mpp, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r(100 + seed);
    const auto p = oracle::random_params(r, {6, 4, 3}, seed);
    const std::size_t n = 2 + r.below(4);
    const auto x = oracle::random_features(r, n, 2, 3), y = oracle::random_features(r, n, 2, 3);
    const auto h = oracle::h_star(x, y, p);
    const auto m = mpp_statistic(x, y, p);
    EXPECT_NEAR(m.mpp, oracle::mpp(h), 1e-12);
    EXPECT_NEAR(variance_estimator(m.h_star), oracle::variance(h), 1e-12);
  }
}

TEST(Mpp, CountMismatch) {
  Rng r(4);
  const auto p = oracle::random_params(r, {6, 3}, 1);
  const auto x = oracle::random_features(r, 3, 2, 3), y = oracle::random_features(r, 2, 2, 3);
  EXPECT_THROW(mpp_statistic(x, y, p), ValidationError);
  EXPECT_THROW(mpp_statistic(std::span(x).first(1), std::span(y).first(1), p), ValidationError);
}

TEST(Variance, Examples) {
  EXPECT_NEAR(variance_estimator(Matrix::Constant(3, 3, 0.7)), 0.0, 1e-15);
  Matrix h(2, 2);
  h << 1.0, 0.0, 0.0, 0.0;
  EXPECT_DOUBLE_EQ(variance_estimator(h), 0.25);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r(seed);
    const std::size_t n = 2 + r.below(4);
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (auto& row : m) {
      for (auto& v : row) v = r.normal();
    }
    EXPECT_NEAR(variance_estimator(oracle::to_matrix(m)), oracle::variance(m), 1e-12);
  }
}

TEST(Objective, ConstantAndZeroCases) {
  // Every feature identical: k == 1 everywhere, H = -1, var = 0 -> J = -1/sqrt(lambda)
  Rng r(5);
  const auto p = oracle::random_params(r, {6, 3}, 1);
  const auto f = oracle::random_feature(r, 2, 3);
  const std::vector<NsgFeature> same(3, f);
  const auto v = objective(same, same, p, 1e-4);
  EXPECT_NEAR(v.mpp, -1.0, 1e-15);
  EXPECT_NEAR(v.variance, 0.0, 1e-15);
  EXPECT_NEAR(v.objective, -1.0 / std::sqrt(1e-4), 1e-9);
  EXPECT_THROW(objective(same, same, p, 0.0), ValidationError);
  Matrix hz = Matrix::Zero(3, 3);
  EXPECT_EQ(mpp_from_h_star(hz), 0.0);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  const std::vector<std::vector<Eigen::Index>> shapes = {{6, 4, 3}, {6, 3}, {6, 5, 4, 2}};
  for (const auto& widths : shapes) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng r(500 + seed);
      const auto p = oracle::random_params(r, widths, seed);
      const auto x = oracle::random_features(r, 4, 2, 3), y = oracle::random_features(r, 4, 2, 3, 1.5);
      const double lam = 1e-3;
      const auto g = objective_with_gradient(x, y, p, lam);
      const auto plain = objective(x, y, p, lam);
      EXPECT_NEAR(g.value.objective, plain.objective, 1e-12 * (1.0 + std::abs(plain.objective)));
      const Vector fd = oracle::finite_difference(p, [&](const KernelParams& q) { return objective(x, y, q, lam).objective; });
      EXPECT_TRUE(oracle::all_close(g.gradient.pack(), fd, 1e-4, 1e-7)) << "seed " << seed << "\n"
                                                                        << g.gradient.pack().transpose() << "\n"
                                                                        << fd.transpose();
    }
  }
}
