#include "nsgvd/error.hpp"
#include "nsgvd/rng.hpp"
#include "nsgvd/tensor.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

using namespace nsgvd;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nsgvd_test_tensor";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::vector<unsigned char> header(std::uint32_t version, std::vector<std::uint32_t> dims) {
  std::vector<unsigned char> b = {'N', 'S', 'G', 'T'};
  auto put = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  put(version);
  put(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put(d);
  return b;
}

FormatError::Kind read_error_kind(const fs::path& p) {
  try {
    read_tensor(p);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected FormatError";
  return FormatError::Kind::kIo;
}

}  // namespace

TEST(TensorFile, ZeroScalarIs24Bytes) {
  const auto p = temp_file("zero.nsgt");
  write_matrix(p, Matrix::Zero(1, 1));
  const auto b = bytes_of(p);
  auto expected = header(1, {1, 1});
  expected.insert(expected.end(), 4, 0);
  EXPECT_EQ(b, expected);
  EXPECT_EQ(b.size(), 24u);
}

TEST(TensorFile, OnesPayloadIsIeeeLittleEndian) {
  const auto p = temp_file("ones.nsgt");
  write_matrix(p, Matrix::Ones(2, 3));
  const auto b = bytes_of(p);
  const auto h = header(1, {2, 3});
  ASSERT_EQ(b.size(), h.size() + 24);
  EXPECT_TRUE(std::equal(h.begin(), h.end(), b.begin()));
  for (std::size_t i = h.size(); i < b.size(); i += 4) {
    EXPECT_EQ(b[i], 0x00);
    EXPECT_EQ(b[i + 1], 0x00);
    EXPECT_EQ(b[i + 2], 0x80);
    EXPECT_EQ(b[i + 3], 0x3F);
  }
}

TEST(TensorFile, RoundTripMatchesBytesOnDisk) {
  Rng rng(42);
  Matrix m(8, 16);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-3.0, 3.0);
  const auto p = temp_file("rt.nsgt");
  write_matrix(p, m);
  const Matrix back = read_matrix(p);
  const auto b = bytes_of(p);
  ASSERT_EQ(back.rows(), 8);
  ASSERT_EQ(back.cols(), 16);
  const std::size_t off = header(1, {8, 16}).size();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    float f;
    std::memcpy(&f, b.data() + off + 4 * static_cast<std::size_t>(i), 4);
    EXPECT_EQ(back.data()[i], static_cast<double>(f));
    EXPECT_EQ(static_cast<float>(m.data()[i]), f);
  }
}

TEST(TensorFile, RoundTripPropertyOverShapesAndSeeds) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    Tensor t;
    const auto rank = 1 + rng.below(4);
    for (std::uint64_t r = 0; r < rank; ++r) t.dims.push_back(static_cast<std::uint32_t>(1 + rng.below(5)));
    t.values.resize(t.element_count());
    for (auto& v : t.values) v = static_cast<double>(static_cast<float>(rng.normal() * 100.0));
    const auto p = temp_file("prop.nsgt");
    write_tensor(p, t);
    EXPECT_EQ(read_tensor(p), t) << "seed " << seed;
  }
}

TEST(TensorFile, BadMagic) {
  const auto p = temp_file("magic.nsgt");
  auto b = header(1, {1, 1});
  b[0] = b[1] = b[2] = b[3] = 'X';
  b.insert(b.end(), 4, 0);
  write_bytes(p, b);
  EXPECT_EQ(read_error_kind(p), FormatError::Kind::kBadMagic);
}

TEST(TensorFile, TruncatedPayload) {
  const auto p = temp_file("trunc.nsgt");
  auto b = header(1, {2, 2});
  b.insert(b.end(), 12, 0);
  write_bytes(p, b);
  EXPECT_EQ(read_error_kind(p), FormatError::Kind::kTruncated);
}

TEST(TensorFile, TrailingBytesAreLengthMismatch) {
  const auto p = temp_file("long.nsgt");
  auto b = header(1, {1, 1});
  b.insert(b.end(), 8, 0);
  write_bytes(p, b);
  EXPECT_EQ(read_error_kind(p), FormatError::Kind::kLengthMismatch);
}

TEST(TensorFile, UnsupportedVersion) {
  const auto p = temp_file("ver.nsgt");
  auto b = header(7, {1, 1});
  b.insert(b.end(), 4, 0);
  write_bytes(p, b);
  EXPECT_EQ(read_error_kind(p), FormatError::Kind::kUnsupportedVersion);
}

TEST(TensorFile, MissingFileIsIoError) {
  EXPECT_EQ(read_error_kind(temp_file("does_not_exist.nsgt")), FormatError::Kind::kIo);
}

TEST(TensorFile, RejectsNonFiniteBeforeWriting) {
  const auto p = temp_file("nan.nsgt");
  fs::remove(p);
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(write_matrix(p, m), ValidationError);
  EXPECT_FALSE(fs::exists(p));
  m(1, 1) = 1e300;  // overflows float
  EXPECT_THROW(write_matrix(p, m), ValidationError);
  EXPECT_FALSE(fs::exists(p));
}

TEST(VideoTensorTest, Invariants) {
  EXPECT_THROW(VideoTensor(Matrix::Zero(1, 4)), ValidationError);
  Matrix m = Matrix::Zero(3, 2);
  m(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(VideoTensor{m}, ValidationError);
  EXPECT_NO_THROW(VideoTensor(Matrix::Zero(2, 1)));
}

TEST(UniformSample, IdentityWhenCountsMatch) {
  Matrix m(8, 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(i);
  const VideoTensor v(m);
  EXPECT_EQ(uniform_frame_sample(v, 8).frames(), m);
  EXPECT_EQ(uniform_frame_sample(uniform_frame_sample(v, 8), 8).frames(), m);
}

TEST(UniformSample, SixteenToEight) {
  const std::vector<Eigen::Index> expected = {0, 2, 4, 6, 8, 10, 12, 14};
  EXPECT_EQ(uniform_frame_indices(16, 8), expected);
  Matrix m(16, 1);
  for (Eigen::Index i = 0; i < 16; ++i) m(i, 0) = static_cast<double>(i);
  const auto s = uniform_frame_sample(VideoTensor(m), 8);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_EQ(s.frame(i)(0), static_cast<double>(expected[static_cast<std::size_t>(i)]));
}

TEST(UniformSample, InsufficientFrames) {
  EXPECT_THROW(uniform_frame_sample(VideoTensor(Matrix::Zero(7, 3)), 8), DataError);
}

TEST(UniformSample, IndicesMonotoneAndFormula) {
  for (Eigen::Index raw = 8; raw <= 64; ++raw) {
    const auto idx = uniform_frame_indices(raw, 8);
    ASSERT_EQ(idx.size(), 8u);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      EXPECT_EQ(idx[i], static_cast<Eigen::Index>(i) * raw / 8);
      if (i > 0) EXPECT_GT(idx[i], idx[i - 1]);
    }
  }
}
