#include "nsgvd/error.hpp"
#include "nsgvd/parallel.hpp"
#include "nsgvd/theory.hpp"
#include "nsgvd/theory_suite.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace nsgvd;

namespace {

TrialOptions trials(std::uint64_t n, std::uint64_t seed = 1) { return TrialOptions{n, seed, false}; }

}  // namespace

TEST(BoundReport, SlackAndPassRule) {
  EXPECT_DOUBLE_EQ(binomial_slack(0.05, 10000), 3.0 * std::sqrt(0.05 * 0.95 / 10000.0));
  BoundCheckReport r;
  r.trials = 10000;
  r.bound_rate = 0.05;
  r.violations = 500 + static_cast<std::uint64_t>(std::floor(10000 * binomial_slack(0.05, 10000)));
  r.finalize();
  EXPECT_TRUE(r.pass);
  r.violations += 1;
  r.finalize();
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.pass, r.empirical_rate <= r.bound_rate + r.slack);
}

TEST(SampleChi2, Moments) {
  Rng rng(3);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += sample_chi2(rng, 4, 2.0);
  EXPECT_NEAR(s / n, 6.0, 0.05);
}

TEST(Chi2Tail, ExactSurvivalAtD4) {
  const auto r = chi2_tail_check(4, 0.0, 1.0, trials(20000));
  EXPECT_DOUBLE_EQ(r.upper.details["threshold"].get<double>(), 10.0);
  const double exact = boost::math::cdf(boost::math::complement(boost::math::chi_squared(4.0), 10.0));
  EXPECT_NEAR(exact, std::exp(-5.0) * 6.0, 1e-14);
  EXPECT_NEAR(exact, 0.04043, 1e-5);
  EXPECT_LE(exact, std::exp(-1.0));
  EXPECT_NEAR(r.upper.empirical_rate, exact, 0.006);
  EXPECT_TRUE(r.pass());
}

TEST(Chi2Tail, VacuousAsTGoesToZero) {
  const auto r = chi2_tail_check(3, 0.0, 1e-9, trials(20000));
  EXPECT_NEAR(r.upper.bound_rate, 1.0, 1e-8);
  EXPECT_TRUE(r.pass());
}

TEST(Chi2Tail, MonteCarloD16Phi10) {
  const auto r = chi2_tail_check(16, 10.0, 2.0, trials(100000));
  EXPECT_LE(r.upper.empirical_rate, std::exp(-2.0) + r.upper.slack);
  EXPECT_TRUE(r.pass());
  EXPECT_THROW(chi2_tail_check(0, 1.0, 1.0, trials(10)), ValidationError);
  EXPECT_THROW(chi2_tail_check(2, -1.0, 1.0, trials(10)), ValidationError);
}

TEST(Chi2Tail, WorkerCountIndependent) {
  set_thread_count(1);
  const auto a = chi2_tail_check(4, 1.0, 1.0, trials(10000, 9));
  set_thread_count(4);
  const auto b = chi2_tail_check(4, 1.0, 1.0, trials(10000, 9));
  set_thread_count(1);
  EXPECT_EQ(a.upper.violations, b.upper.violations);
  EXPECT_EQ(a.lower.violations, b.lower.violations);
  EXPECT_EQ(a.upper.statistic_mean, b.upper.statistic_mean);
}

TEST(CorollaryA2, ThresholdAndCoverage) {
  const double thr = corollary_a2_threshold(1, 0.0, 0.5);
  EXPECT_NEAR(thr, 1.0 + std::sqrt(4.0 * std::log(4.0)) + 2.0 * std::log(4.0), 1e-14);
  EXPECT_NEAR(thr, 6.1274, 1e-4);
  EXPECT_NEAR(boost::math::cdf(boost::math::chi_squared(1.0), thr), 0.9867, 1e-4);
  EXPECT_TRUE(corollary_a2_check(1, 0.0, 0.5, trials(20000)).pass);
  const auto r = corollary_a2_check(4, 1.0, 0.05, trials(100000));
  EXPECT_GE(1.0 - r.empirical_rate, 0.95 - r.slack);
  EXPECT_TRUE(r.pass);
}

TEST(CorollaryA2, ImpliedByTailCheck) {
  const double delta = 0.1;
  const auto tail = chi2_tail_check(4, 1.0, std::log(2.0 / delta), trials(20000, 4));
  const auto cor = corollary_a2_check(4, 1.0, delta, trials(20000, 4));
  EXPECT_NEAR(tail.upper.details["threshold"].get<double>(), cor.details["threshold"].get<double>(), 1e-12);
  if (tail.pass()) {
    EXPECT_TRUE(cor.pass);
  }
}

TEST(ComponentLaw, ConstantScheduleIsExactlyLambda) {
  GaussianProcessSpec spec;
  spec.d = 4;
  spec.T = 1;
  spec.schedule = SigmaSchedule::constant(1.3);
  spec.mu = Vector::Constant(4, 0.5);
  const auto r = nsg_component_law_check(spec, 1.0, 0.1, trials(5000));
  EXPECT_TRUE(r.constant_case);
  EXPECT_TRUE(r.pass);
}

TEST(ComponentLaw, LinearScheduleFitsChiSquared) {
  GaussianProcessSpec spec;
  spec.d = 4;
  spec.T = 1;
  spec.schedule = SigmaSchedule::linear(0.0, 1.0);  // sigma(t) = t
  spec.mu = shift_for_phi(4, 1.0, 1.0);
  const auto r = nsg_component_law_check(spec, 1.0, 0.1, trials(100000));
  EXPECT_DOUBLE_EQ(r.phi, 1.0);
  EXPECT_LT(r.ks_real, 0.01);
  EXPECT_LT(r.ks_fake, 0.01);
  EXPECT_NEAR(r.fake_mean, 5.0, 0.05);
  EXPECT_TRUE(r.pass);
}

TEST(PropA6, BoundValueAndCoverage) {
  const double l80 = std::log(80.0);
  const double expected = 1.0 + 2.0 * std::sqrt(6.0 * l80) + 2.0 * std::sqrt(4.0 * l80) + 2.0 * l80;
  EXPECT_NEAR(prop_a6_bound(4, 1.0, 1.0, 0.05), expected, 1e-12);
  EXPECT_NEAR(expected, 28.3925, 1e-4);
  EXPECT_NEAR(prop_a6_bound(4, 1.0, 0.5, 0.05), 0.5 * expected, 1e-12);
  EXPECT_NEAR(prop_a6_bound(4, 1.0, 0.5, 0.05, false), expected, 1e-12);

  GaussianProcessSpec fake;
  fake.d = 4;
  fake.T = 1;
  fake.schedule = SigmaSchedule::linear(0.0, 1.0);
  fake.mu = shift_for_phi(4, 1.0, 1.0);
  GaussianProcessSpec real = fake;
  real.mu = Vector::Zero(4);
  const auto r = prop_a6_check(real, fake, 1.0, 0.1, 0.05, trials(100000));
  EXPECT_GE(1.0 - r.empirical_rate, 0.95 - r.slack);
  EXPECT_TRUE(r.pass);

  const auto same = prop_a6_check(real, real, 1.0, 0.1, 0.05, trials(50000));
  EXPECT_TRUE(same.pass);
}

TEST(PropA7, NormBounds) {
  const auto r = prop_a7_check(4, 1.0, 0.05, trials(100000));
  EXPECT_TRUE(r.real_norm.pass);
  EXPECT_TRUE(r.fake_norm.pass);
  EXPECT_TRUE(r.difference.pass);
}

TEST(PropA8, StatedConstants) {
  const double l40 = std::log(40.0);
  const auto c2 = prop_a8_constants(1.0, -1.0, 4, 0.0, 3.0, 0.05);
  EXPECT_EQ(c2.sign_case, 2);
  EXPECT_NEAR(std::sqrt(4.0 * l40), 3.8413, 1e-4);
  EXPECT_NEAR(c2.stated_c, 3.0 + 2.0 * std::sqrt(4.0 * l40), 1e-12);
  EXPECT_NEAR(c2.stated_c - 3.0, 7.6826, 1e-4);
  EXPECT_LT(c2.stated_lambda_floor, 0.0);

  const double r = 0.3;
  const auto c1 = prop_a8_constants(2.0, 0.6, 4, 0.0, 5.0, 0.05);
  EXPECT_EQ(c1.sign_case, 1);
  EXPECT_NEAR(c1.stated_lambda_floor, r * (4.0 - 2.0 * std::sqrt(4.0 * l40) - 2.0 * l40), 1e-12);
  EXPECT_THROW(prop_a8_constants(1.0, 0.0, 4, 0.0, 1.0, 0.05), ValidationError);
}

TEST(PropA8, CorrectedConstantsHoldByMonteCarlo) {
  for (double sd : {0.1, -0.1, 0.5, -0.5}) {
    const auto r = prop_a8_check(1.0, sd, 4, shift_for_phi(4, 1.0, 1.0), 10.0, 0.05, trials(100000));
    EXPECT_TRUE(r.pass) << "sigma_dot " << sd << " rate " << r.empirical_rate;
    EXPECT_TRUE(r.details.contains("violation_rate_stated_c"));
  }
  EXPECT_THROW(prop_a8_check(1.0, 1.0, 4, shift_for_phi(4, 1.0, 1.0), 0.1, 0.05, trials(100)), AdmissibilityError);
}

TEST(Theorem1Bound, HandValue) {
  // log(12 T / delta) = 1 with T = 1
  EXPECT_NEAR(compute_theorem1_bound(0.0, 1, 1, 1.0, 1.0, 12.0 / std::exp(1.0)), 66.0, 1e-12);
}

TEST(Theorem1Bound, DirectionalProbes) {
  const double base = compute_theorem1_bound(1.0, 4, 8, 1.5, 1.0, 0.05);
  EXPECT_GT(compute_theorem1_bound(1.1, 4, 8, 1.5, 1.0, 0.05), base);
  EXPECT_GT(compute_theorem1_bound(1.0, 5, 8, 1.5, 1.0, 0.05), base);
  EXPECT_GT(compute_theorem1_bound(1.0, 4, 9, 1.5, 1.0, 0.05), base);
  EXPECT_LT(compute_theorem1_bound(1.0, 4, 8, 1.6, 1.0, 0.05), base);
  EXPECT_LT(compute_theorem1_bound(1.0, 4, 8, 1.5, 1.1, 0.05), base);
  for (std::int64_t T : {1, 4, 16}) {
    const double delta = 0.05;
    const double ratio = compute_theorem1_bound(1.0, 4, 2 * T, 1.5, 1.0, delta) /
                         compute_theorem1_bound(1.0, 4, T, 1.5, 1.0, delta);
    const double l1 = std::log(12.0 * T / delta), l2 = std::log(24.0 * T / delta);
    EXPECT_GT(ratio, 2.0);
    EXPECT_LE(ratio, 2.0 * (l2 / l1) * (l2 / l1));
  }
}

TEST(Theorem1Check, AdmissibilityGuards) {
  TheoremBoundInputs in;
  in.mu = shift_for_phi(4, 1.0, 1.0);
  EXPECT_GT(admissible_c(in), 0.0);
  in.lambda_nsg = 0.1;  // below the floor for sigma' = 0.1
  EXPECT_THROW(admissible_c(in), AdmissibilityError);
  in.lambda_nsg = 2.0;
  in.C = 50.0;
  EXPECT_THROW(admissible_c(in), AdmissibilityError);
  in.C = -1.0;
  EXPECT_THROW(admissible_c(in), AdmissibilityError);
  in.C.reset();
  in.sigma_dot = 0.0;
  EXPECT_EQ(admissible_c(in), in.lambda_nsg);
  in.delta = 1.5;
  EXPECT_THROW(admissible_c(in), ValidationError);
}

TEST(Theorem1Check, RatesAndOrdering) {
  TheoremBoundInputs in;
  in.mu = shift_for_phi(4, 1.0, 1.0);
  const double c = admissible_c(in);
  in.C = c;
  const auto fake = theorem1_violation_check(in, trials(10000));
  in.mu = Vector::Zero(4);
  const auto real = theorem1_violation_check(in, trials(10000));
  EXPECT_TRUE(fake.pass);
  EXPECT_TRUE(real.pass);
  EXPECT_GT(fake.statistic_mean, real.statistic_mean);
  EXPECT_GT(real.details["acceptance_rate"].get<double>(), 0.0);
  EXPECT_LE(real.details["acceptance_rate"].get<double>(), 1.0);
  in.delta = 0.5;
  in.C.reset();
  const auto loose = theorem1_violation_check(in, trials(10000));
  EXPECT_LE(loose.empirical_rate, 0.5 + loose.slack);
}

TEST(TheorySuite, EmptySelectionAndUnknownNames) {
  TheorySuiteConfig cfg;
  cfg.checks.clear();
  const auto r = run_theory_suite(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.bundle.empty());
  cfg.checks = {"nope"};
  EXPECT_THROW(run_theory_suite(cfg), ValidationError);
}

TEST(TheorySuite, InadmissibleTheoremConstants) {
  TheorySuiteConfig cfg;
  cfg.checks = {"theorem1"};
  cfg.theorem_c = 100.0;
  EXPECT_THROW(run_theory_suite(cfg), AdmissibilityError);
}

TEST(TheorySuite, SmallRunWritesSamples) {
  TheorySuiteConfig cfg;
  cfg.checks = {"corollary_a2", "prop_a7"};
  cfg.trials = 5000;
  cfg.keep_samples = true;
  const auto r = run_theory_suite(cfg);
  EXPECT_TRUE(r.bundle.contains("corollary_a2"));
  EXPECT_EQ(r.samples.size(), 4u * 5000u);
  std::ostringstream os;
  write_samples_csv(os, r.samples);
  EXPECT_EQ(os.str().rfind("check,trial,value\n", 0), 0u);
}

TEST(TheorySuite, ShiftForPhi) {
  const Vector mu = shift_for_phi(4, 2.0, 3.0);
  EXPECT_NEAR(mu.squaredNorm() / 9.0, 2.0, 1e-14);
  EXPECT_EQ(mu(1), 0.0);
}
