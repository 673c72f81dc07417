#include "nsgvd/tensor.hpp"

#include "nsgvd/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <string>

namespace nsgvd {
namespace {

constexpr std::array<char, 4> kMagic = {'N', 'S', 'G', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string describe(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

}  // namespace

std::size_t Tensor::element_count() const {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

Tensor tensor_from_matrix(const Matrix& m) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.values.assign(m.data(), m.data() + m.size());
  return t;
}

Matrix matrix_from_tensor(const Tensor& t) {
  if (t.dims.size() != 2) {
    throw DataError("expected a rank-2 tensor, got rank " + std::to_string(t.dims.size()));
  }
  Matrix m(t.dims[0], t.dims[1]);
  std::copy(t.values.begin(), t.values.end(), m.data());
  return m;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (tensor.dims.empty()) throw ValidationError("tensor must have rank >= 1");
  for (auto d : tensor.dims) {
    if (d == 0) throw ValidationError("tensor dims must be positive");
  }
  if (tensor.values.size() != tensor.element_count()) {
    throw ValidationError("tensor value count does not match its dims");
  }
  constexpr double kFloatMax = std::numeric_limits<float>::max();
  for (double v : tensor.values) {
    if (!std::isfinite(v) || std::abs(v) > kFloatMax) {
      throw ValidationError("refusing to write non-finite tensor entry to " + describe(path));
    }
  }

  std::string bytes;
  bytes.reserve(12 + 4 * tensor.dims.size() + 4 * tensor.values.size());
  bytes.append(kMagic.data(), kMagic.size());
  put_u32(bytes, kTensorFormatVersion);
  put_u32(bytes, static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(bytes, d);
  for (double v : tensor.values) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot open " + describe(path) + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::kIo, "write failed for " + describe(path));
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, "cannot open " + describe(path));
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  const std::size_t size = raw.size();

  if (size < 4 || !std::equal(kMagic.begin(), kMagic.end(), raw.begin())) {
    throw FormatError(FormatError::Kind::kBadMagic, describe(path) + ": bad magic, not an NSGT file");
  }
  if (size < 12) throw FormatError(FormatError::Kind::kTruncated, describe(path) + ": truncated header");
  const std::uint32_t version = get_u32(p + 4);
  if (version != kTensorFormatVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      describe(path) + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t rank = get_u32(p + 8);
  if (rank == 0) throw FormatError(FormatError::Kind::kLengthMismatch, describe(path) + ": rank 0");
  const std::size_t header = 12 + 4 * static_cast<std::size_t>(rank);
  if (size < header) throw FormatError(FormatError::Kind::kTruncated, describe(path) + ": truncated dims");

  Tensor t;
  t.dims.resize(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims[i] = get_u32(p + 12 + 4 * i);
    if (t.dims[i] == 0) {
      throw FormatError(FormatError::Kind::kLengthMismatch, describe(path) + ": zero-length dim");
    }
  }
  const std::size_t count = t.element_count();
  const std::size_t payload = size - header;
  if (payload < 4 * count) {
    throw FormatError(FormatError::Kind::kTruncated,
                      describe(path) + ": truncated payload (" + std::to_string(payload) + " of " +
                          std::to_string(4 * count) + " bytes)");
  }
  if (payload > 4 * count) {
    throw FormatError(FormatError::Kind::kLengthMismatch,
                      describe(path) + ": payload length " + std::to_string(payload) +
                          " exceeds dims (" + std::to_string(4 * count) + " bytes)");
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.values[i] = static_cast<double>(std::bit_cast<float>(get_u32(p + header + 4 * i)));
  }
  return t;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) { write_tensor(path, tensor_from_matrix(m)); }

Matrix read_matrix(const std::filesystem::path& path) { return matrix_from_tensor(read_tensor(path)); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

VideoTensor::VideoTensor(Matrix frames) : frames_(std::move(frames)) {
  if (frames_.rows() < 2) throw ValidationError("a video needs at least two frames");
  if (frames_.cols() < 1) throw ValidationError("a video needs a positive spatial dimension");
  if (!frames_.allFinite()) throw ValidationError("video contains non-finite entries");
}

ScoreField::ScoreField(Matrix scores) : scores_(std::move(scores)) {
  if (scores_.rows() < 1 || scores_.cols() < 1) throw ValidationError("empty score field");
  if (!scores_.allFinite()) throw ValidationError("score field contains non-finite entries");
}

std::vector<Eigen::Index> uniform_frame_indices(Eigen::Index raw_count, Eigen::Index target_count) {
  if (target_count < 1) throw ValidationError("target frame count must be positive");
  if (raw_count < target_count) {
    throw DataError("insufficient frames: have " + std::to_string(raw_count) + ", need " +
                    std::to_string(target_count));
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(target_count));
  for (Eigen::Index i = 0; i < target_count; ++i) idx[static_cast<std::size_t>(i)] = (i * raw_count) / target_count;
  return idx;
}

VideoTensor uniform_frame_sample(const VideoTensor& video, Eigen::Index target_count) {
  const auto idx = uniform_frame_indices(video.frame_count(), target_count);
  Matrix out(target_count, video.spatial_dim());
  for (Eigen::Index i = 0; i < target_count; ++i) out.row(i) = video.frame(idx[static_cast<std::size_t>(i)]);
  return VideoTensor(std::move(out));
}

}  // namespace nsgvd
