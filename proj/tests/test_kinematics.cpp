#include <gtest/gtest.h>

#include <random>

#include "motionseg/kinematics.hpp"

using namespace motionseg;

namespace {

UnitQuaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Vec4 c(g(rng), g(rng), g(rng), g(rng));
  return UnitQuaternion::from_coeffs(c.normalized());
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Skew, ZeroVectorGivesZeroMatrix) { EXPECT_EQ(skew(Vec3::Zero()), Mat3::Zero()); }

TEST(Skew, UnitXBasis) {
  Mat3 expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_EQ(skew(Vec3::UnitX()), expected);
}

TEST(Skew, CrossProductAndAntisymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a(u(rng), u(rng), u(rng));
    const Vec3 b(u(rng), u(rng), u(rng));
    EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-12);
    EXPECT_EQ(skew(a) + skew(a).transpose(), Mat3::Zero());
    EXPECT_LT((skew(a) * a).norm(), 1e-12);
  }
}

TEST(JqMatrix, Identity) {
  const Mat43 j = jq_matrix(UnitQuaternion::identity());
  EXPECT_EQ(j.row(0), Eigen::RowVector3d::Zero());
  EXPECT_EQ(Mat3(j.bottomRows<3>()), Mat3::Identity());
}

TEST(JqMatrix, HalfTurnAboutX) {
  const Mat43 j = jq_matrix(UnitQuaternion::unchecked(0, Vec3::UnitX()));
  Mat43 expected;
  expected << -1, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_EQ(j, expected);
}

TEST(JqMatrix, FrozenValue) {
  const auto q = UnitQuaternion::unchecked(0.5, Vec3(0.5, -0.5, 0.5));
  Mat43 expected;
  // [-eps^T; eta I + S(eps)]
  expected << -0.5, 0.5, -0.5,  //
      0.5, -0.5, -0.5,          //
      0.5, 0.5, -0.5,           //
      0.5, 0.5, 0.5;
  EXPECT_LT(max_abs(jq_matrix(q) - expected), 1e-15);
}

TEST(JqMatrix, OrthonormalColumns) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Mat43 j = jq_matrix(random_quaternion(rng));
    EXPECT_LT(max_abs(j.transpose() * j - Mat3::Identity()), 1e-12);
  }
}

TEST(JqMatrix, RejectsNonUnit) {
  try {
    jq_matrix(UnitQuaternion::unchecked(1.1, Vec3::Zero()));
    FAIL() << "expected NonUnitQuaternion";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonUnitQuaternion);
  }
}

TEST(QuatRateToOmega, BasicCases) {
  const auto id = UnitQuaternion::identity();
  EXPECT_EQ(quat_rate_to_omega(id, Vec4::Zero()), Vec3::Zero());
  EXPECT_LT((quat_rate_to_omega(id, Vec4(0, 0.5, 0, 0)) - Vec3(1, 0, 0)).norm(), 1e-15);
  const Vec3 w0(0, 0, 2);
  EXPECT_LT((quat_rate_to_omega(id, 0.5 * jq_matrix(id) * w0) - w0).norm(), 1e-15);
}

TEST(QuatRateToOmega, RoundtripRandom) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    const auto q = random_quaternion(rng);
    Vec3 w(u(rng), u(rng), u(rng));
    w *= 10.0 * std::abs(u(rng)) / std::max(w.norm(), 1e-9);
    EXPECT_LT((quat_rate_to_omega(q, omega_to_quat_rate(q, w)) - w).norm(), 1e-12);
  }
}

TEST(SpatialOmega, IsBodyOmegaRotatedIntoFrame) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto q = random_quaternion(rng);
    const Vec3 body(0.3, -0.1, 0.7);
    const Vec4 qdot = omega_to_quat_rate(q, body);
    EXPECT_LT((spatial_omega(q, qdot) - q.rotation_matrix() * body).norm(), 1e-12);
  }
}

TEST(UnitQuaternion, RotationMatrixMatchesIndependentReference) {
  // Axis (1,2,3)/sqrt(14), angle 0.7 rad; reference from an independent library.
  const auto q = UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 0.7);
  Mat3 expected;
  expected << 0.781639173907025, -0.4829292842142121, 0.3947397981737998,  //
      0.5501172307043583, 0.8320301337746346, -0.07139249941787586,       //
      -0.29395787843858057, 0.27295633888831433, 0.9160150668873173;
  EXPECT_LT(max_abs(q.rotation_matrix() - expected), 1e-14);
  EXPECT_LT((q.coeffs() - Vec4(0.9393727128473789, 0.0916432938695913, 0.1832865877391826,
                               0.27492988160877385)).norm(), 1e-15);
}

TEST(UnitQuaternion, HamiltonProductFrozen) {
  const auto a = UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 0.7);
  const auto b = UnitQuaternion::exp(Vec3(0.3, -0.2, 0.5));
  const Vec4 expected(0.8319652292855131, 0.2981693817141048, 0.10023203062929234, 0.45703655992060493);
  EXPECT_LT(((a * b).coeffs() - expected).norm(), 1e-15);
  EXPECT_LT(max_abs((a * b).rotation_matrix() - a.rotation_matrix() * b.rotation_matrix()), 1e-14);
}

TEST(UnitQuaternion, IngestRenormalizesWithinTolerance) {
  const auto q = UnitQuaternion::from_components(1.0005, 0, 0, 0);
  EXPECT_DOUBLE_EQ(q.eta(), 1.0);
  EXPECT_THROW(UnitQuaternion::from_components(1.01, 0, 0, 0), Error);
  EXPECT_THROW(UnitQuaternion::from_components(0, 0, 0, 0), Error);
}

TEST(ExpressInFrame, FrozenValue) {
  PoseSeries raw;
  raw.samples.push_back({0.0, Vec3(0.5, -1, 2), UnitQuaternion::exp(Vec3(0.3, -0.2, 0.5))});
  const PoseSample frame{0.0, Vec3(1, 2, 3), UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 0.7)};
  const auto out = express_in_frame(raw, frame);
  EXPECT_LT((out.samples[0].p - Vec3(-1.7472134006280067, -2.5275820981051123, -0.8992074677205897)).norm(),
            1e-14);
  EXPECT_LT((out.samples[0].q.coeffs() -
             Vec4(0.9582440418336803, -0.02079844152604223, -0.28514599075466746, 0.00524834039283261))
                .norm(),
            1e-15);
}

TEST(ExpressInFrame, IdentityAndSelfRelative) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  PoseSeries raw;
  for (int i = 0; i < 10; ++i) raw.samples.push_back({0.1 * i, Vec3(u(rng), u(rng), u(rng)), random_quaternion(rng)});

  const auto same = express_in_frame(raw, PoseSample{});
  for (std::size_t k = 0; k < raw.size(); ++k) {
    EXPECT_LT((same.samples[k].p - raw.samples[k].p).norm(), 1e-15);
    EXPECT_LT((same.samples[k].q.coeffs() - raw.samples[k].q.coeffs()).norm(), 1e-15);
  }
  const auto rel = express_in_frame(raw, raw.samples[0]);
  EXPECT_LT(rel.samples[0].p.norm(), 1e-15);
  EXPECT_LT(std::abs(rel.samples[0].q.eta() - 1.0), 1e-15);
  EXPECT_LT(rel.samples[0].q.eps().norm(), 1e-15);

  const auto back = apply_frame(rel, raw.samples[0]);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    EXPECT_LT((back.samples[k].p - raw.samples[k].p).norm(), 1e-9);
    EXPECT_LT(max_abs(back.samples[k].q.rotation_matrix() - raw.samples[k].q.rotation_matrix()), 1e-9);
  }
}

TEST(ExpressInFrame, EmptySeriesThrows) {
  try {
    express_in_frame(PoseSeries{}, PoseSample{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySeries);
  }
}

TEST(SignContinuity, RestoresFlippedSampleAndIsIdempotent) {
  PoseSeries s;
  for (int i = 0; i < 5; ++i) s.samples.push_back({0.1 * i, Vec3::Zero(), UnitQuaternion::exp(Vec3(0.1 * i, 0, 0))});
  PoseSeries flipped = s;
  flipped.samples[2].q = -flipped.samples[2].q;
  const auto fixed = enforce_sign_continuity(flipped);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(fixed.samples[k].q.coeffs(), s.samples[k].q.coeffs());

  const auto twice = enforce_sign_continuity(fixed);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(twice.samples[k].q.coeffs(), fixed.samples[k].q.coeffs());
}

TEST(SignContinuity, RandomSeriesKeepsRotations) {
  std::mt19937_64 rng(9);
  PoseSeries s;
  for (int i = 0; i < 100; ++i) s.samples.push_back({0.01 * i, Vec3::Zero(), random_quaternion(rng)});
  const auto out = enforce_sign_continuity(s);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_LT(max_abs(out.samples[k].q.rotation_matrix() - s.samples[k].q.rotation_matrix()), 1e-12);
    if (k > 0) {
      EXPECT_GE(out.samples[k].q.dot(out.samples[k - 1].q), 0.0);
    }
  }
}
