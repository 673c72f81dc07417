#include "nsgvd/deep_kernel.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/parallel.hpp"
#include "nsgvd/rng.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace nsgvd {
namespace {

constexpr std::array<char, 4> kCheckpointMagic = {'N', 'S', 'G', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

double sigmoid(double r) { return 1.0 / (1.0 + std::exp(-r)); }

void check_shapes(const NsgFeature& a, const NsgFeature& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw DataError("kernel inputs have different shapes (" + std::to_string(a.values.rows()) + "x" +
                    std::to_string(a.values.cols()) + " vs " + std::to_string(b.values.rows()) + "x" +
                    std::to_string(b.values.cols()) + ")");
  }
}

struct TracedEmbedding {
  Vector raw;
  std::vector<Vector> trace;
  const Vector& phi() const { return trace.back(); }
};

std::vector<TracedEmbedding> embed_traced(std::span<const NsgFeature> set, const KernelParams& params) {
  std::vector<TracedEmbedding> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].flat_size() != params.net.input_dim()) {
      throw DataError("feature size " + std::to_string(set[i].flat_size()) + " does not match net input " +
                      std::to_string(params.net.input_dim()));
    }
    out[i].raw = set[i].flat();
    out[i].trace = params.net.forward_trace(out[i].raw);
  }
  return out;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

class ByteReader {
 public:
  ByteReader(std::string data, std::string where) : data_(std::move(data)), where_(std::move(where)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte(i)) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte(i)) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  unsigned char byte(int i) const { return static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]); }
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw FormatError(FormatError::Kind::kTruncated, where_ + ": truncated checkpoint");
  }

  std::string data_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// FeatureNet

FeatureNet::FeatureNet(const std::vector<Eigen::Index>& widths, std::uint64_t seed) {
  if (widths.size() < 2) throw ValidationError("feature net needs an input and an output width");
  for (auto w : widths) {
    if (w < 1) throw ValidationError("feature net widths must be positive");
  }
  Rng rng = Rng::derive(seed, "kernel.init");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Eigen::Index in = widths[l];
    const Eigen::Index out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Vector(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
}

FeatureNet::FeatureNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("feature net needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weight.rows()) throw ValidationError("layer bias size mismatch");
    if (l > 0 && layers_[l].weight.cols() != layers_[l - 1].weight.rows()) {
      throw ValidationError("consecutive layer widths do not chain");
    }
    if (!layers_[l].weight.allFinite() || !layers_[l].bias.allFinite()) {
      throw ValidationError("feature net weights must be finite");
    }
  }
}

Vector FeatureNet::forward(const Eigen::Ref<const Vector>& x) const {
  Vector a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].weight * a + layers_[l].bias;
    a = (l + 1 < layers_.size()) ? Vector(z.array().tanh()) : z;
  }
  return a;
}

std::vector<Vector> FeatureNet::forward_trace(const Eigen::Ref<const Vector>& x) const {
  std::vector<Vector> trace;
  trace.reserve(layers_.size() + 1);
  trace.emplace_back(x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].weight * trace.back() + layers_[l].bias;
    trace.push_back((l + 1 < layers_.size()) ? Vector(z.array().tanh()) : z);
  }
  return trace;
}

void FeatureNet::backward(const std::vector<Vector>& trace, const Eigen::Ref<const Vector>& d_output,
                          std::vector<Eigen::MatrixXd>& d_weights, std::vector<Vector>& d_biases) const {
  Vector delta = d_output;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    if (li + 1 < layers_.size()) {
      // tanh'(z) = 1 - tanh(z)^2, and trace[li + 1] holds tanh(z).
      delta.array() *= 1.0 - trace[li + 1].array().square();
    }
    d_weights[li].noalias() += delta * trace[li].transpose();
    d_biases[li] += delta;
    if (li > 0) delta = layers_[li].weight.transpose() * delta;
  }
}

std::vector<Eigen::Index> FeatureNet::widths() const {
  std::vector<Eigen::Index> w;
  if (layers_.empty()) return w;
  w.push_back(layers_.front().weight.cols());
  for (const auto& l : layers_) w.push_back(l.weight.rows());
  return w;
}

Eigen::Index FeatureNet::input_dim() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }

Eigen::Index FeatureNet::output_dim() const { return layers_.empty() ? 0 : layers_.back().weight.rows(); }

Eigen::Index FeatureNet::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

// ---------------------------------------------------------------------------
// KernelParams

KernelParams KernelParams::make(FeatureNet net, double epsilon, double sigma_phi, double sigma_Phi) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (!(sigma_phi > 0.0)) throw ValidationError("sigma_phi must be > 0");
  if (!(sigma_Phi > 0.0)) throw ValidationError("sigma_Phi must be > 0");
  KernelParams p;
  p.epsilon_raw = std::log(epsilon / (1.0 - epsilon));
  p.log_sigma_phi = std::log(sigma_phi);
  p.log_sigma_Phi = std::log(sigma_Phi);
  p.net = std::move(net);
  return p;
}

KernelParams KernelParams::initial(const std::vector<Eigen::Index>& widths, std::uint64_t seed) {
  return make(FeatureNet(widths, seed), 0.5, 0.1, 100.0);
}

double KernelParams::epsilon() const { return sigmoid(epsilon_raw); }
double KernelParams::sigma_phi() const { return std::exp(log_sigma_phi); }
double KernelParams::sigma_Phi() const { return std::exp(log_sigma_Phi); }

Eigen::Index KernelParams::parameter_count() const { return 3 + net.parameter_count(); }

Vector KernelParams::pack() const {
  Vector v(parameter_count());
  Eigen::Index k = 0;
  v(k++) = epsilon_raw;
  v(k++) = log_sigma_phi;
  v(k++) = log_sigma_Phi;
  for (const auto& layer : net.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) v(k++) = layer.weight(r, c);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) v(k++) = layer.bias(r);
  }
  return v;
}

void KernelParams::unpack(const Eigen::Ref<const Vector>& packed) {
  if (packed.size() != parameter_count()) throw ValidationError("packed parameter vector has the wrong size");
  Eigen::Index k = 0;
  epsilon_raw = packed(k++);
  log_sigma_phi = packed(k++);
  log_sigma_Phi = packed(k++);
  for (auto& layer : net.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = packed(k++);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = packed(k++);
  }
}

std::vector<bool> KernelParams::weight_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(parameter_count()), false);
  std::size_t k = 3;
  for (const auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) mask[k++] = true;
    k += static_cast<std::size_t>(layer.bias.size());
  }
  return mask;
}

// ---------------------------------------------------------------------------
// KernelGradient

KernelGradient KernelGradient::zeros_like(const KernelParams& params) {
  KernelGradient g;
  for (const auto& layer : params.net.layers()) {
    g.weights.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.biases.push_back(Vector::Zero(layer.bias.size()));
  }
  return g;
}

Vector KernelGradient::pack() const {
  Eigen::Index n = 3;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  Vector v(n);
  Eigen::Index k = 0;
  v(k++) = epsilon_raw;
  v(k++) = log_sigma_phi;
  v(k++) = log_sigma_Phi;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) v(k++) = weights[l](r, c);
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) v(k++) = biases[l](r);
  }
  return v;
}

KernelGradient& KernelGradient::operator+=(const KernelGradient& other) {
  epsilon_raw += other.epsilon_raw;
  log_sigma_phi += other.log_sigma_phi;
  log_sigma_Phi += other.log_sigma_Phi;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

KernelGradient& KernelGradient::operator*=(double s) {
  epsilon_raw *= s;
  log_sigma_phi *= s;
  log_sigma_Phi *= s;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
  return *this;
}

// ---------------------------------------------------------------------------
// Kernel evaluation

Embedded embed(const NsgFeature& feature, const KernelParams& params) {
  if (feature.flat_size() != params.net.input_dim()) {
    throw DataError("feature size " + std::to_string(feature.flat_size()) + " does not match net input " +
                    std::to_string(params.net.input_dim()));
  }
  Embedded e;
  e.raw = feature.flat();
  e.phi = params.net.forward(e.raw);
  return e;
}

std::vector<Embedded> embed_all(std::span<const NsgFeature> features, const KernelParams& params) {
  std::vector<Embedded> out(features.size());
  parallel_for(features.size(), [&](std::size_t i) { out[i] = embed(features[i], params); });
  return out;
}

double kernel_value(const Embedded& a, const Embedded& b, const KernelParams& params) {
  const double eps = params.epsilon();
  const double sphi = params.sigma_phi();
  const double sPhi = params.sigma_Phi();
  const double d_phi = (a.phi - b.phi).squaredNorm();
  const double d_raw = (a.raw - b.raw).squaredNorm();
  const double kappa = std::exp(-d_phi / (2.0 * sphi * sphi));
  const double outer = std::exp(-d_raw / (2.0 * sPhi * sPhi));
  return ((1.0 - eps) * kappa + eps) * outer;
}

double kernel_eval(const NsgFeature& a, const NsgFeature& b, const KernelParams& params) {
  check_shapes(a, b);
  return kernel_value(embed(a, params), embed(b, params), params);
}

GramMatrix gram(std::span<const NsgFeature> set_a, std::span<const NsgFeature> set_b, const KernelParams& params) {
  if (set_a.data() == set_b.data() && set_a.size() == set_b.size()) return gram(set_a, params);
  for (const auto& a : set_a) {
    for (const auto& b : set_b) check_shapes(a, b);
  }
  const auto ea = embed_all(set_a, params);
  const auto eb = embed_all(set_b, params);
  GramMatrix g{Matrix(static_cast<Eigen::Index>(set_a.size()), static_cast<Eigen::Index>(set_b.size())), false};
  parallel_for(set_a.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < set_b.size(); ++j) {
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel_value(ea[i], eb[j], params);
    }
  });
  return g;
}

GramMatrix gram(std::span<const NsgFeature> set, const KernelParams& params) {
  for (std::size_t i = 1; i < set.size(); ++i) check_shapes(set[0], set[i]);
  const auto e = embed_all(set, params);
  const auto n = static_cast<Eigen::Index>(set.size());
  GramMatrix g{Matrix(n, n), true};
  parallel_for(set.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    g.values(ii, ii) = kernel_value(e[i], e[i], params);
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      g.values(ii, static_cast<Eigen::Index>(j)) = kernel_value(e[i], e[j], params);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) g.values(j, i) = g.values(i, j);
  }
  return g;
}

KernelGradient kernel_gradients(std::span<const NsgFeature> set_a, std::span<const NsgFeature> set_b,
                                const KernelParams& params, const Matrix& upstream) {
  if (upstream.rows() != static_cast<Eigen::Index>(set_a.size()) ||
      upstream.cols() != static_cast<Eigen::Index>(set_b.size())) {
    throw ValidationError("upstream matrix shape does not match the Gram shape");
  }
  for (const auto& a : set_a) {
    for (const auto& b : set_b) check_shapes(a, b);
  }

  KernelGradient grad = KernelGradient::zeros_like(params);
  const auto ea = embed_traced(set_a, params);
  const auto eb = embed_traced(set_b, params);
  const Eigen::Index out_dim = params.net.output_dim();
  std::vector<Vector> d_phi_a(set_a.size(), Vector::Zero(out_dim));
  std::vector<Vector> d_phi_b(set_b.size(), Vector::Zero(out_dim));

  const double eps = params.epsilon();
  const double sphi2 = params.sigma_phi() * params.sigma_phi();
  const double sPhi2 = params.sigma_Phi() * params.sigma_Phi();

  // Sequential accumulation keeps the reduction order fixed.
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    for (std::size_t j = 0; j < set_b.size(); ++j) {
      const double u = upstream(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (u == 0.0) continue;
      const Vector diff = ea[i].phi() - eb[j].phi();
      const double d_phi = diff.squaredNorm();
      const double d_raw = (ea[i].raw - eb[j].raw).squaredNorm();
      const double kappa = std::exp(-d_phi / (2.0 * sphi2));
      const double outer = std::exp(-d_raw / (2.0 * sPhi2));
      const double mix = (1.0 - eps) * kappa + eps;

      grad.epsilon_raw += u * (1.0 - kappa) * outer * eps * (1.0 - eps);
      grad.log_sigma_phi += u * (1.0 - eps) * outer * kappa * d_phi / sphi2;
      grad.log_sigma_Phi += u * mix * outer * d_raw / sPhi2;

      const double c = u * (1.0 - eps) * outer * kappa / sphi2;
      d_phi_a[i] -= c * diff;
      d_phi_b[j] += c * diff;
    }
  }
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    if (!d_phi_a[i].isZero(0.0)) params.net.backward(ea[i].trace, d_phi_a[i], grad.weights, grad.biases);
  }
  for (std::size_t j = 0; j < set_b.size(); ++j) {
    if (!d_phi_b[j].isZero(0.0)) params.net.backward(eb[j].trace, d_phi_b[j], grad.weights, grad.biases);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Checkpoint

void write_checkpoint(const std::filesystem::path& path, const KernelParams& params) {
  std::string bytes(kCheckpointMagic.begin(), kCheckpointMagic.end());
  put_u32(bytes, kCheckpointVersion);
  const auto widths = params.net.widths();
  put_u32(bytes, static_cast<std::uint32_t>(params.net.layers().size()));
  for (auto w : widths) put_u32(bytes, static_cast<std::uint32_t>(w));
  put_f64(bytes, params.epsilon());
  for (const auto& layer : params.net.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) put_f64(bytes, layer.weight(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put_f64(bytes, layer.bias(r));
  }
  put_f64(bytes, params.sigma_phi());
  put_f64(bytes, params.sigma_Phi());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::kIo, "write failed for '" + path.string() + "'");
}

KernelParams read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, "cannot open checkpoint '" + path.string() + "'");
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = "'" + path.string() + "'";
  if (raw.size() < 4 || !std::equal(kCheckpointMagic.begin(), kCheckpointMagic.end(), raw.begin())) {
    throw FormatError(FormatError::Kind::kBadMagic, where + ": bad magic, not an NSGK checkpoint");
  }
  ByteReader r(raw.substr(4), where);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion, where + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t layer_count = r.u32();
  if (layer_count == 0 || layer_count > 1024) {
    throw FormatError(FormatError::Kind::kLengthMismatch, where + ": implausible layer count");
  }
  std::vector<Eigen::Index> widths(layer_count + 1);
  for (auto& w : widths) w = r.u32();
  const double eps = r.f64();
  std::vector<DenseLayer> layers;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    DenseLayer layer{Eigen::MatrixXd(widths[l + 1], widths[l]), Vector(widths[l + 1])};
    for (Eigen::Index row = 0; row < layer.weight.rows(); ++row) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(row, c) = r.f64();
    }
    for (Eigen::Index row = 0; row < layer.bias.size(); ++row) layer.bias(row) = r.f64();
    layers.push_back(std::move(layer));
  }
  const double sphi = r.f64();
  const double sPhi = r.f64();
  if (!r.at_end()) throw FormatError(FormatError::Kind::kLengthMismatch, where + ": trailing bytes in checkpoint");
  return KernelParams::make(FeatureNet(std::move(layers)), eps, sphi, sPhi);
}

}  // namespace nsgvd
