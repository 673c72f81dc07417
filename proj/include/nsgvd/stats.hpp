#pragma once

// Small statistical helpers shared by the detector, the theory lab and tests.

#include <functional>
#include <span>
#include <vector>

namespace nsgvd {

double normal_cdf(double z);

double mean(std::span<const double> xs);
/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);

/// Ranks 1..n with tied values sharing their average rank.
std::vector<double> average_ranks(std::span<const double> xs);

struct MannWhitney {
  double u = 0.0;      ///< pairs (a, b) with a > b, ties counted 1/2
  double auc = 0.0;    ///< u / (|a| |b|)
  double z = 0.0;
  double p_greater = 1.0;  ///< one-sided p for "a tends to exceed b"
};

/// Rank-sum test of a against b (normal approximation, tie-corrected, with
/// continuity correction). Both samples must be nonempty.
MannWhitney mann_whitney(std::span<const double> a, std::span<const double> b);

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// One-sided p for mean_a > mean_b from summary statistics (large-sample z test).
double welch_z_greater(double mean_a, double var_a, double n_a, double mean_b, double var_b, double n_b);

}  // namespace nsgvd
