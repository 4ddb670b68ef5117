#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "motionseg/resample.hpp"

using namespace motionseg;

namespace {

// Direct evaluation of the kernel-weighted average, written without the
// library helpers.
double brute_force_nw(const std::vector<double>& t, const std::vector<double>& y, double q, double sigma) {
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const long double w = std::exp(-static_cast<long double>((q - t[i]) * (q - t[i])) / (2.0L * sigma * sigma));
    num += w * y[i];
    den += w;
  }
  return static_cast<double>(num / den);
}

PoseSeries sampled(double duration, double rate, const std::function<PoseSample(double)>& f) {
  PoseSeries s;
  s.source_rate_hz = rate;
  const auto n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    auto p = f(t);
    p.t = t;
    s.samples.push_back(p);
  }
  return s;
}

VelocitySeries series_of(const std::vector<Vec6>& v, double rate = 20.0) {
  VelocitySeries s;
  s.rate = rate;
  for (std::size_t k = 0; k < v.size(); ++k) s.samples.push_back({static_cast<double>(k) / rate, v[k]});
  s.refresh_sup();
  return s;
}

}  // namespace

TEST(NwEstimate, FrozenValue) {
  const std::vector<double> t{0, 0.02, 0.05, 0.11};
  const std::vector<double> y{1.0, -0.5, 2.0, 0.3};
  EXPECT_NEAR(nw_estimate(t, y, 0.04, 0.05), 0.7779555604279988, 1e-15);
}

TEST(NwEstimate, BasicCases) {
  const std::vector<double> t{0, 0.1, 0.2, 0.3};
  const std::vector<double> ones(4, 1.0);
  EXPECT_DOUBLE_EQ(nw_estimate(t, ones, 0.17, 0.05), 1.0);
  const std::vector<double> t2{0, 1}, y2{0, 2};
  for (double sigma : {0.05, 0.3, 5.0}) EXPECT_DOUBLE_EQ(nw_estimate(t2, y2, 0.5, sigma), 1.0);
  // At 50 sigma from both observations the weights underflow.
  EXPECT_THROW(nw_estimate(t2, y2, 0.5, 0.01), Error);
  const std::vector<double> t1{0.4}, y1{-3.25};
  EXPECT_DOUBLE_EQ(nw_estimate(t1, y1, 0.45, 0.05), -3.25);
}

TEST(NwEstimate, ErrorPaths) {
  const std::vector<double> empty;
  try {
    nw_estimate(empty, empty, 0.0, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyObservations);
  }
  const std::vector<double> t{0.0}, y{1.0};
  try {
    nw_estimate(t, y, 1000.0, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateWeights);
  }
}

TEST(NwEstimate, ConvexAndLinear) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 3 + c % 20;
    std::vector<double> t(n), y(n), z(n), mix(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = 0.01 * static_cast<double>(i) + 0.002 * u(rng);
      y[i] = u(rng);
      z[i] = u(rng);
      mix[i] = 0.7 * y[i] - 1.3 * z[i];
    }
    const double q = 0.01 * static_cast<double>(n) * (0.5 + 0.25 * u(rng));
    const double est = nw_estimate(t, y, q, 0.02);
    EXPECT_GE(est, *std::min_element(y.begin(), y.end()) - 1e-15);
    EXPECT_LE(est, *std::max_element(y.begin(), y.end()) + 1e-15);
    EXPECT_NEAR(nw_estimate(t, mix, q, 0.02), 0.7 * est - 1.3 * nw_estimate(t, z, q, 0.02), 1e-12);
    EXPECT_NEAR(est, brute_force_nw(t, y, q, 0.02), 1e-12);
  }
}

TEST(GridSize, Arithmetic) {
  EXPECT_EQ(grid_size(3.0, 20.0), 61u);
  EXPECT_EQ(grid_size(2.999, 20.0), 60u);
  EXPECT_EQ(grid_size(0.1, 20.0), 3u);
}

TEST(ResamplePose, GridLengthFor500HzInput) {
  const auto s = sampled(3.0, 500.0, [](double) { return PoseSample{}; });
  const auto out = resample_pose(s, {});
  ASSERT_EQ(out.size(), 61u);
  EXPECT_DOUBLE_EQ(out.samples.back().t, 3.0);
  for (const auto& p : out.samples) {
    EXPECT_LT(p.p.norm(), 1e-15);
    EXPECT_LT(std::abs(p.q.eta() - 1.0), 1e-15);
  }
}

TEST(ResamplePose, LinearRampMatchesBruteForce) {
  const auto s = sampled(3.0, 500.0, [](double t) { return PoseSample{0.0, Vec3(0.1 * t, 0, 0), {}}; });
  const auto out = resample_pose(s, {0.05, 20.0});
  std::vector<double> t, y;
  for (const auto& p : s.samples) {
    t.push_back(p.t);
    y.push_back(p.p.x());
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double tk = out.samples[k].t;
    EXPECT_NEAR(out.samples[k].p.x(), brute_force_nw(t, y, tk, 0.05), 1e-12);
  }
  // Away from the ends (4 sigma) the kernel is symmetric and a ramp is reproduced.
  for (std::size_t k = 4; k + 4 < out.size(); ++k) {
    EXPECT_NEAR(out.samples[k].p.x(), 0.1 * out.samples[k].t, 1e-6);
  }
}

TEST(ResamplePose, TooShortThrows) {
  const auto s = sampled(0.05, 500.0, [](double) { return PoseSample{}; });
  try {
    resample_pose(s, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSeriesTooShort);
  }
}

TEST(ResamplePose, ToleratesQuaternionSignFlips) {
  auto s = sampled(2.0, 500.0, [](double t) { return PoseSample{0.0, Vec3::Zero(), UnitQuaternion::exp(Vec3(0.5 * t, 0, 0))}; });
  for (std::size_t i = 1; i < s.size(); i += 2) s.samples[i].q = -s.samples[i].q;
  const auto out = resample_pose(s, {});
  for (const auto& p : out.samples) {
    const auto ref = UnitQuaternion::exp(Vec3(0.5 * p.t, 0, 0));
    EXPECT_GT(std::abs(p.q.dot(ref)), 1.0 - 1e-4);
  }
}

TEST(CentralDiff, BasicCases) {
  const double dt = 0.05;
  std::vector<double> c(40, 2.5), lin(40), quad(41);
  for (std::size_t k = 0; k < lin.size(); ++k) lin[k] = 3.0 * dt * static_cast<double>(k);
  for (std::size_t k = 0; k < quad.size(); ++k) quad[k] = std::pow(dt * static_cast<double>(k), 2);
  for (double d : central_diff(c, dt)) EXPECT_EQ(d, 0.0);
  for (double d : central_diff(lin, dt)) EXPECT_NEAR(d, 3.0, 1e-9);
  EXPECT_NEAR(central_diff(quad, dt)[20], 2.0, 1e-9);  // t = 1.0
}

TEST(CentralDiff, ExactOnQuadraticsIncludingEnds) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int c = 0; c < 100; ++c) {
    const double a = u(rng), b = u(rng), q = u(rng), dt = 0.01 + 0.1 * std::abs(u(rng));
    std::vector<double> y(25);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double t = dt * static_cast<double>(k);
      y[k] = a + b * t + q * t * t;
    }
    const auto d = central_diff(y, dt);
    for (std::size_t k = 0; k < y.size(); ++k) {
      EXPECT_NEAR(d[k], b + 2 * q * dt * static_cast<double>(k), 1e-9);
    }
  }
}

TEST(CentralDiff, TooShortThrows) {
  const std::vector<double> y{1, 2};
  EXPECT_THROW(central_diff(y, 0.05), Error);
}

TEST(Differentiate, ConstantPoseGivesZero) {
  const auto s = sampled(3.0, 20.0, [](double) {
    return PoseSample{0.0, Vec3(0.3, -0.2, 1.0), UnitQuaternion::from_axis_angle(Vec3(1, 1, 0), 0.4)};
  });
  const auto v = differentiate(s);
  ASSERT_EQ(v.size(), 61u);
  for (const auto& t : v.samples) EXPECT_LE(t.v.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(v.sup_translational, 1e-12);
  EXPECT_LE(v.sup_angular, 1e-12);
}

TEST(Differentiate, PureTranslation) {
  const auto s = sampled(3.0, 20.0, [](double t) { return PoseSample{0.0, Vec3(0.1 * t, 0, 0), {}}; });
  const auto v = differentiate(s);
  EXPECT_DOUBLE_EQ(v.rate, 20.0);
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    EXPECT_LT((v.samples[k].v - (Vec6() << 0.1, 0, 0, 0, 0, 0).finished()).norm(), 1e-6);
  }
}

TEST(Differentiate, ConstantRateRotationAboutX) {
  const auto s = sampled(3.0, 20.0, [](double t) {
    return PoseSample{0.0, Vec3::Zero(), UnitQuaternion::unchecked(std::cos(0.25 * t), Vec3(std::sin(0.25 * t), 0, 0))};
  });
  const auto v = differentiate(s);
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    EXPECT_LT((v.samples[k].v.tail<3>() - Vec3(0.5, 0, 0)).norm(), 1e-3);
    EXPECT_LT(v.samples[k].v.head<3>().norm(), 1e-15);
  }
}

TEST(Differentiate, AngularVelocityIsInFrameAxes) {
  // Spin about the {F} z axis after a fixed 90 degree offset about x.
  const auto offset = UnitQuaternion::from_axis_angle(Vec3::UnitX(), M_PI / 2);
  const auto s = sampled(3.0, 20.0, [&](double t) {
    return PoseSample{0.0, Vec3::Zero(), UnitQuaternion::exp(Vec3(0, 0, 0.4 * t)) * offset};
  });
  const auto v = differentiate(s);
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    EXPECT_LT((v.samples[k].v.tail<3>() - Vec3(0, 0, 0.4)).norm(), 1e-3);
  }
}

TEST(Differentiate, RejectsNonUniformGrid) {
  auto s = sampled(1.0, 20.0, [](double) { return PoseSample{}; });
  s.samples[5].t += 0.01;
  EXPECT_THROW(differentiate(s), Error);
}

TEST(SupNormalize, BasicCases) {
  std::vector<Vec6> v(10, Vec6::Zero());
  v[3] << 0.2, -0.1, 0, 0, 0.5, 0;
  v[7] << -0.05, 0, 0.1, -0.25, 0, 0.1;
  const auto n = sup_normalize(series_of(v));
  EXPECT_DOUBLE_EQ(n.sup_translational, 1.0);
  EXPECT_DOUBLE_EQ(n.sup_angular, 1.0);
  EXPECT_DOUBLE_EQ(n.samples[7].v(0), -0.25);

  const auto again = sup_normalize(n);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_LT((again.samples[k].v - n.samples[k].v).norm(), 1e-12);

  std::vector<Vec6> tr(10, Vec6::Zero());
  tr[4] << 0, 0.3, 0, 0, 0, 0;
  const auto t = sup_normalize(series_of(tr));
  EXPECT_DOUBLE_EQ(t.samples[4].v(1), 1.0);
  EXPECT_EQ(t.sup_angular, 0.0);
}

TEST(SupNormalize, MotionlessThrows) {
  try {
    sup_normalize(series_of(std::vector<Vec6>(10, Vec6::Constant(1e-8))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateInput);
  }
}

TEST(SupNormalize, PreservesExtremaLocationAndSign) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::vector<Vec6> v(50);
  for (auto& x : v) x = Vec6::NullaryExpr([&] { return g(rng); });
  const auto in = series_of(v);
  const auto out = sup_normalize(in);
  for (int a = 0; a < 6; ++a) {
    std::size_t arg_in = 0, arg_out = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (std::abs(in.samples[k].v(a)) > std::abs(in.samples[arg_in].v(a))) arg_in = k;
      if (std::abs(out.samples[k].v(a)) > std::abs(out.samples[arg_out].v(a))) arg_out = k;
    }
    EXPECT_EQ(arg_in, arg_out);
    EXPECT_EQ(std::signbit(in.samples[arg_in].v(a)), std::signbit(out.samples[arg_out].v(a)));
  }
}
