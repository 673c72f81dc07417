#pragma once

// Deep kernel on NSG features:
//
//   k(a, b) = [(1 - eps) * kappa(phi(a), phi(b)) + eps] * Phi(a, b)
//   kappa(u, v) = exp(-|u - v|^2 / (2 sigma_phi^2))
//   Phi(a, b)   = exp(-|a - b|^2 / (2 sigma_Phi^2))
//
// phi is a small fully connected net (tanh hidden layers, linear output).
// eps, sigma_phi and sigma_Phi are stored unconstrained:
//   eps = sigmoid(epsilon_raw), sigma_phi = exp(log_sigma_phi), sigma_Phi = exp(log_sigma_Phi)
// and all gradients are reported with respect to these raw values.

#include "nsgvd/nsg.hpp"
#include "nsgvd/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nsgvd {

struct DenseLayer {
  Eigen::MatrixXd weight;  ///< out x in
  Vector bias;
};

class FeatureNet {
 public:
  FeatureNet() = default;
  /// widths = {input, hidden..., output}; at least two entries.
  FeatureNet(const std::vector<Eigen::Index>& widths, std::uint64_t seed);
  explicit FeatureNet(std::vector<DenseLayer> layers);

  Vector forward(const Eigen::Ref<const Vector>& x) const;

  /// Forward pass that keeps every layer output for the backward pass.
  std::vector<Vector> forward_trace(const Eigen::Ref<const Vector>& x) const;

  /// Accumulates d(loss)/d(weights, biases) given d(loss)/d(output) and the
  /// trace of the same input.
  void backward(const std::vector<Vector>& trace, const Eigen::Ref<const Vector>& d_output,
                std::vector<Eigen::MatrixXd>& d_weights, std::vector<Vector>& d_biases) const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  std::vector<Eigen::Index> widths() const;
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  Eigen::Index parameter_count() const;

 private:
  std::vector<DenseLayer> layers_;
};

struct KernelParams {
  double epsilon_raw = 0.0;
  double log_sigma_phi = 0.0;
  double log_sigma_Phi = 0.0;
  FeatureNet net;

  /// Builds params from constrained values; throws ValidationError when out of range.
  static KernelParams make(FeatureNet net, double epsilon, double sigma_phi, double sigma_Phi);
  /// Defaults: eps = 0.5, sigma_phi = 0.1, sigma_Phi = 100, uniform(+-1/sqrt(fan_in)) weights.
  static KernelParams initial(const std::vector<Eigen::Index>& widths, std::uint64_t seed);

  double epsilon() const;
  double sigma_phi() const;
  double sigma_Phi() const;

  /// Unconstrained parameter vector: epsilon_raw, log_sigma_phi, log_sigma_Phi,
  /// then per layer the weight (row-major) and the bias.
  Vector pack() const;
  void unpack(const Eigen::Ref<const Vector>& packed);
  Eigen::Index parameter_count() const;
  /// Mask over pack() marking feature-net weight entries (not biases, not kernel scalars).
  std::vector<bool> weight_mask() const;
};

struct KernelGradient {
  double epsilon_raw = 0.0;
  double log_sigma_phi = 0.0;
  double log_sigma_Phi = 0.0;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Vector> biases;

  static KernelGradient zeros_like(const KernelParams& params);
  /// Same layout as KernelParams::pack().
  Vector pack() const;
  KernelGradient& operator+=(const KernelGradient& other);
  KernelGradient& operator*=(double s);
};

/// A feature with its net embedding cached.
struct Embedded {
  Vector raw;
  Vector phi;
};

Embedded embed(const NsgFeature& feature, const KernelParams& params);
std::vector<Embedded> embed_all(std::span<const NsgFeature> features, const KernelParams& params);

double kernel_value(const Embedded& a, const Embedded& b, const KernelParams& params);
double kernel_eval(const NsgFeature& a, const NsgFeature& b, const KernelParams& params);

struct GramMatrix {
  Matrix values;
  bool symmetric = false;
};

/// Entry (i, j) = k(A_i, B_j). When A and B are the same span, each unordered
/// pair is computed once and mirrored.
GramMatrix gram(std::span<const NsgFeature> set_a, std::span<const NsgFeature> set_b, const KernelParams& params);
GramMatrix gram(std::span<const NsgFeature> set, const KernelParams& params);

/// Exact gradient of sum_ij upstream(i, j) * k(A_i, B_j).
KernelGradient kernel_gradients(std::span<const NsgFeature> set_a, std::span<const NsgFeature> set_b,
                                const KernelParams& params, const Matrix& upstream);

/// NSGK checkpoint: "NSGK", u32 version, u32 layer count, u32 widths (count + 1),
/// then f64 LE in declaration order: eps, per layer weight (row-major) and bias,
/// sigma_phi, sigma_Phi.
void write_checkpoint(const std::filesystem::path& path, const KernelParams& params);
KernelParams read_checkpoint(const std::filesystem::path& path);

}  // namespace nsgvd
