#pragma once

// Runs a selection of theory checks and gathers their reports.

#include "nsgvd/theory.hpp"

#include <ostream>

namespace nsgvd {

/// Check names accepted in TheorySuiteConfig::checks.
const std::vector<std::string>& theory_check_names();

struct TheorySuiteConfig {
  std::vector<std::string> checks = theory_check_names();
  std::uint64_t trials = 100000;
  std::uint64_t theorem_trials = 10000;
  std::uint64_t seed = 0;
  bool keep_samples = false;

  std::vector<long long> chi2_d = {1, 4, 16};
  std::vector<double> chi2_phi = {0.0, 1.0, 10.0};
  std::vector<double> chi2_t = {0.5, 1.0, 2.0};

  std::int64_t corollary_d = 4;
  double corollary_phi = 1.0;
  double corollary_delta = 0.05;

  /// sigma(t) = a + b t evaluated at process time component_t.
  std::int64_t component_d = 4;
  double component_sigma_a = 0.0;
  double component_sigma_b = 1.0;
  double component_t = 1.0;
  double component_phi = 1.0;
  double component_lambda = 0.1;

  std::int64_t a6_d = 4;
  double a6_sigma = 1.0;
  double a6_sigma_dot = 1.0;
  double a6_phi = 1.0;
  double a6_lambda = 0.1;
  double a6_delta = 0.05;

  std::int64_t a7_d = 4;
  double a7_phi = 1.0;
  double a7_delta = 0.05;

  std::int64_t a8_d = 4;
  double a8_sigma = 1.0;
  std::vector<double> a8_sigma_dot = {0.1, -0.1};
  double a8_phi = 1.0;
  double a8_lambda = 2.0;
  double a8_delta = 0.05;

  std::int64_t theorem_d = 4;
  std::int64_t theorem_T = 8;
  std::vector<double> theorem_phi = {0.0, 1.0};
  double theorem_sigma = 1.0;
  double theorem_sigma_dot = 0.1;
  double theorem_lambda = 2.0;
  double theorem_delta = 0.05;
  /// Shared lower bound C; empty uses the admissible constant of the largest phi.
  std::optional<double> theorem_c;
  /// One-sided significance for the mean-distance ordering across phi values.
  double ordering_alpha = 0.01;
};

struct TheorySuiteResult {
  nlohmann::json bundle = nlohmann::json::object();
  bool pass = true;
  /// Raw per-trial statistics: (check, trial, value). Filled when keep_samples.
  struct Sample {
    std::string check;
    std::uint64_t trial;
    double value;
  };
  std::vector<Sample> samples;
};

/// Unknown check names raise ValidationError; inadmissible theorem constants
/// raise AdmissibilityError.
TheorySuiteResult run_theory_suite(const TheorySuiteConfig& cfg);

void write_samples_csv(std::ostream& out, const std::vector<TheorySuiteResult::Sample>& samples);

/// Shift vector with |mu|^2 / sigma^2 = phi, placed on the first coordinate.
Vector shift_for_phi(std::int64_t d, double phi, double sigma);

}  // namespace nsgvd
