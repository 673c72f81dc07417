#include "nsgvd/error.hpp"
#include "nsgvd/nsg.hpp"
#include "nsgvd/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace nsgvd;
namespace fs = std::filesystem;

namespace {

VideoTensor video_1d(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return VideoTensor(m);
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

bool rel_close(double a, double b, double rtol) { return std::abs(a - b) <= rtol * std::abs(b); }

}  // namespace

TEST(FrameDisplacement, StaticVideoIsZero) {
  const VideoTensor v(Matrix::Constant(4, 3, 2.5));
  for (Eigen::Index t = 0; t < 4; ++t) {
    EXPECT_EQ(*frame_displacement(v, t, LastFrameRule::kBackwardDifference), Vector::Zero(3));
  }
}

TEST(FrameDisplacement, ForwardAndBackward) {
  const auto v = video_1d({0, 1, 3});
  EXPECT_EQ((*frame_displacement(v, 0, LastFrameRule::kBackwardDifference))(0), 1.0);
  EXPECT_EQ((*frame_displacement(v, 1, LastFrameRule::kBackwardDifference))(0), 2.0);
  EXPECT_EQ((*frame_displacement(v, 2, LastFrameRule::kBackwardDifference))(0), 2.0);
  EXPECT_FALSE(frame_displacement(v, 2, LastFrameRule::kDropLast).has_value());
  EXPECT_THROW(frame_displacement(v, 3, LastFrameRule::kDropLast), ValidationError);
}

TEST(TemporalDenominator, Examples) {
  EXPECT_EQ(temporal_denominator(vec({3, -4}), Vector::Zero(2), 1.0, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(temporal_denominator(vec({-1, 2}), vec({1, 1}), 1.0, 0.5), 1.5);
}

TEST(TemporalDenominator, TranslatingGaussianIsExact) {
  // d=1, c=1, sigma=1, x=2 at t=1, lambda=0
  TranslatingDensitySpec spec;
  spec.velocity = vec({1});
  const Vector x = vec({2});
  const Vector s = translating_score(x, spec, 1.0);
  EXPECT_DOUBLE_EQ(s(0), -1.0);
  const double denom = temporal_denominator(s, spec.velocity, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(denom, -1.0);
  EXPECT_DOUBLE_EQ(denom, -translating_temporal_derivative(x, spec, 1.0));
}

TEST(TemporalDenominator, ScaleCovariance) {
  Rng r(4);
  for (int k = 0; k < 20; ++k) {
    Vector s(7), dx(7);
    for (Eigen::Index j = 0; j < 7; ++j) s(j) = r.normal(), dx(j) = r.normal();
    const double dt = r.uniform(0.1, 3.0);
    EXPECT_NEAR(temporal_denominator(s, 2.0 * dx, 2.0 * dt, 0.1), temporal_denominator(s, dx, dt, 0.1), 1e-13);
  }
}

TEST(NsgFeatureTest, ZeroScoresGiveZeroFeature) {
  GaussianProcessSpec spec;
  const auto v = sample_video(spec);
  const PrecomputedScoreProvider zero(ScoreField(Matrix::Zero(spec.T, spec.d)));
  const NsgConfig cfg;
  const auto f = nsg_feature(v, zero, cfg);
  EXPECT_EQ(f.values, Matrix::Zero(spec.T, spec.d));
  for (double d : f.denominators) EXPECT_EQ(d, cfg.lambda_nsg);
  EXPECT_EQ(f.flagged_count(), 0u);
}

TEST(NsgFeatureTest, DropLastKeepsTMinusOne) {
  GaussianProcessSpec spec;
  NsgConfig cfg;
  cfg.last_frame_rule = LastFrameRule::kDropLast;
  const auto f = nsg_feature(sample_video(spec), GaussianOracleProvider(spec), cfg);
  EXPECT_EQ(f.frame_count(), spec.T - 1);
  cfg.last_frame_rule = LastFrameRule::kBackwardDifference;
  EXPECT_EQ(nsg_feature(sample_video(spec), GaussianOracleProvider(spec), cfg).frame_count(), spec.T);
}

TEST(NsgFeatureTest, OracleWithExactDisplacementsMatchesClosedForm) {
  // dx chosen along the score so that <s, dx>/dt equals -d/dt log p exactly.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GaussianProcessSpec spec;
    spec.d = 16;
    spec.T = 8;
    spec.seed = seed;
    spec.schedule = SigmaSchedule::linear(0.5, 0.25);
    const auto v = sample_video(spec);
    NsgConfig cfg;
    cfg.lambda_nsg = 0.1;
    Matrix scores(spec.T, spec.d), dx(spec.T, spec.d);
    for (Eigen::Index f = 0; f < spec.T; ++f) {
      const double t = static_cast<double>(f + 1);
      const Vector s = GaussianOracleProvider(spec).score(v, f);
      scores.row(f) = s.transpose();
      dx.row(f) = (s * (-oracle_temporal_derivative(v.frame(f).transpose(), spec, t)) / s.squaredNorm()).transpose();
    }
    const auto g = nsg_from_displacements(scores, dx, cfg);
    for (Eigen::Index f = 0; f < spec.T; ++f) {
      const Vector exact = closed_form_nsg(v.frame(f).transpose(), spec, static_cast<double>(f + 1), cfg.lambda_nsg);
      for (Eigen::Index j = 0; j < spec.d; ++j) EXPECT_TRUE(rel_close(g.values(f, j), exact(j), 1e-6));
    }
  }
}

TEST(NsgFeatureTest, TranslatingSequenceDenominatorsExactAtInteriorFrames) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TranslatingDensitySpec spec;
    spec.d = 3;
    spec.T = 6;
    spec.seed = seed;
    spec.velocity = vec({0.5, -1.0, 0.25});
    const auto seq = translating_sequence(spec);
    NsgConfig cfg;
    cfg.lambda_nsg = 0.1;
    cfg.denominator_floor = 0.0;
    const auto f = nsg_feature(seq.video, TranslatingOracleProvider(spec), cfg);
    for (Eigen::Index t = 0; t + 1 < spec.T; ++t) {
      const double exact = -seq.dlogp_dt[static_cast<std::size_t>(t)] + cfg.lambda_nsg;
      EXPECT_TRUE(rel_close(f.denominators[static_cast<std::size_t>(t)], exact, 1e-6)) << seed << " " << t;
    }
  }
}

TEST(NsgFeatureTest, FlaggedFramesDivideBySignedFloor) {
  // frame 0: s=(1), dx=(-0.1) -> D = -0.1 + 0.1 = 0 -> flagged
  Matrix s(2, 1), dx(2, 1);
  s << 1.0, 1.0;
  dx << -0.1, 1.0;
  NsgConfig cfg;
  cfg.denominator_floor = 1e-3;
  const auto f = nsg_from_displacements(s, dx, cfg);
  EXPECT_TRUE(f.flags[0]);
  EXPECT_FALSE(f.flags[1]);
  EXPECT_EQ(f.flagged_count(), 1u);
  EXPECT_TRUE(std::isfinite(f.values(0, 0)));
  EXPECT_NEAR(std::abs(f.values(0, 0)), 1e3, 1e-6);
  EXPECT_DOUBLE_EQ(f.values(1, 0), 1.0 / 1.1);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_TRUE(f.flags[t] || std::abs(f.denominators[t]) >= cfg.denominator_floor);
  }
}

TEST(NsgFeatureTest, AllFramesDegenerateIsAnError) {
  Matrix s = Matrix::Ones(2, 1), dx = Matrix::Constant(2, 1, -0.1);
  NsgConfig cfg;
  cfg.denominator_floor = 1e-3;
  EXPECT_THROW(nsg_from_displacements(s, dx, cfg), DegenerateError);
}

TEST(NsgFeatureTest, ShapeMismatchAndConfig) {
  GaussianProcessSpec spec;
  const auto v = sample_video(spec);
  const PrecomputedScoreProvider wrong(ScoreField(Matrix::Zero(spec.T, spec.d + 1)));
  EXPECT_THROW(nsg_feature(v, wrong, NsgConfig{}), DataError);
  NsgConfig bad;
  bad.lambda_nsg = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = {};
  bad.delta_t = -1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  EXPECT_THROW(parse_last_frame_rule("wrap"), ValidationError);
  EXPECT_EQ(parse_last_frame_rule(to_string(LastFrameRule::kDropLast)), LastFrameRule::kDropLast);
}

TEST(NsgFeatureTest, NearLambdaFractionIsSmallOnDefaultSpecs) {
  std::vector<NsgFeature> feats;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GaussianProcessSpec spec;
    spec.seed = i;
    if (i % 2) spec.mu = Vector::Constant(spec.d, 0.25);
    feats.push_back(nsg_feature(sample_video(spec), GaussianOracleProvider(spec), NsgConfig{}));
  }
  EXPECT_LT(near_lambda_fraction(feats, 0.1), 0.01);
}

TEST(NsgFeatureTest, FileRoundTripWithSidecar) {
  GaussianProcessSpec spec;
  spec.seed = 3;
  const auto f = nsg_feature(sample_video(spec), GaussianOracleProvider(spec), NsgConfig{});
  const fs::path dir = fs::temp_directory_path() / "nsgvd_test_nsg";
  fs::create_directories(dir);
  const auto p = dir / "f.nsgt";
  write_feature(p, f);
  ASSERT_TRUE(fs::exists(sidecar_path(p)));
  const auto back = read_feature(p);
  EXPECT_EQ(back.values, f.values.cast<float>().cast<double>());
  EXPECT_EQ(back.denominators, f.denominators);
  EXPECT_EQ(back.flags, f.flags);
  fs::remove(sidecar_path(p));
  const auto bare = read_feature(p);
  EXPECT_EQ(bare.frame_count(), f.frame_count());
}
