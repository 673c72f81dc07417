#pragma once

// Dense tensors, the NSGT on-disk format, and frame sampling.
//
// NSGT layout (all little-endian):
//   bytes 0..3   "NSGT"
//   u32          version (= 1)
//   u32          rank
//   u32 x rank   dims
//   f32 x prod(dims)  row-major payload
//
// Files hold 32-bit floats; everything in memory is double.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nsgvd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr std::uint32_t kTensorFormatVersion = 1;

/// Rank-k tensor with row-major storage.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

Tensor tensor_from_matrix(const Matrix& m);
/// Requires rank 2.
Matrix matrix_from_tensor(const Tensor& t);

/// Rejects non-finite entries (including values that overflow float) and zero dims
/// before touching the file.
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

/// T x d frame sequence. Invariants: T >= 2, all entries finite.
class VideoTensor {
 public:
  explicit VideoTensor(Matrix frames);

  const Matrix& frames() const noexcept { return frames_; }
  Eigen::Index frame_count() const noexcept { return frames_.rows(); }
  Eigen::Index spatial_dim() const noexcept { return frames_.cols(); }
  auto frame(Eigen::Index t) const { return frames_.row(t); }

 private:
  Matrix frames_;
};

/// Per-frame score estimates, same shape as the video they describe.
class ScoreField {
 public:
  explicit ScoreField(Matrix scores);

  const Matrix& scores() const noexcept { return scores_; }
  Eigen::Index frame_count() const noexcept { return scores_.rows(); }
  Eigen::Index spatial_dim() const noexcept { return scores_.cols(); }

 private:
  Matrix scores_;
};

bool all_finite(const Matrix& m);

/// Indices floor(i * raw_count / target_count), i = 0..target_count-1.
std::vector<Eigen::Index> uniform_frame_indices(Eigen::Index raw_count, Eigen::Index target_count);

/// Throws DataError when the video has fewer than target_count frames.
VideoTensor uniform_frame_sample(const VideoTensor& video, Eigen::Index target_count);

}  // namespace nsgvd
