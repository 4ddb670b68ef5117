// Nadaraya-Watson smoothing onto a uniform grid and centered numerical
// differentiation of poses into generalized velocities.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/kinematics.hpp"

namespace motionseg {

struct KernelConfig {
  double sigma = 0.05;        // seconds
  double output_rate = 20.0;  // Hz, one kernel per output sample

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::kInvalidArgument, "sigma must be > 0");
    if (!(output_rate > 0.0) || !std::isfinite(output_rate)) {
      fail(ErrorCode::kInvalidArgument, "output_rate must be > 0");
    }
  }
};

/// Velocity groups whose supremum is at or below this are left unnormalized.
inline constexpr double kSupNormalizeThreshold = 1e-6;

struct VelocitySeries {
  std::vector<TwistSample> samples;
  double rate = 0.0;  // Hz
  std::string recording_id;
  double sup_translational = 0.0;  // m/s (or normalized units)
  double sup_angular = 0.0;        // rad/s (or normalized units)

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  /// Recomputes the sup fields from the samples.
  void refresh_sup() {
    sup_translational = 0.0;
    sup_angular = 0.0;
    for (const auto& s : samples) {
      sup_translational = std::max(sup_translational, s.v.head<3>().cwiseAbs().maxCoeff());
      sup_angular = std::max(sup_angular, s.v.tail<3>().cwiseAbs().maxCoeff());
    }
  }
};

inline VelocitySeries scaled(const VelocitySeries& series, double c) {
  VelocitySeries out = series;
  for (auto& s : out.samples) s.v *= c;
  out.refresh_sup();
  return out;
}

inline double gaussian_kernel(double dt, double sigma) {
  return std::exp(-(dt * dt) / (2.0 * sigma * sigma));
}

/// Kernel-weighted average of `obs_y` at `query_t` with a Gaussian kernel of
/// bandwidth `sigma`. Sums in index order.
inline double nw_estimate(std::span<const double> obs_t, std::span<const double> obs_y,
                          double query_t, double sigma) {
  if (obs_t.empty() || obs_y.empty()) fail(ErrorCode::kEmptyObservations, "no observations");
  if (obs_t.size() != obs_y.size()) {
    fail(ErrorCode::kInvalidArgument, "observation times and values differ in length");
  }
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "sigma must be > 0");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < obs_t.size(); ++i) {
    const double w = gaussian_kernel(query_t - obs_t[i], sigma);
    num += w * obs_y[i];
    den += w;
  }
  if (!(den > 0.0)) {
    fail(ErrorCode::kDegenerateWeights,
         "kernel weights underflow at t=" + std::to_string(query_t));
  }
  return num / den;
}

/// Number of grid samples t = 0, 1/rate, ... <= duration.
inline std::size_t grid_size(double duration, double rate) {
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
}

/// Smooths all seven pose channels onto a uniform grid starting at t = 0
/// (relative to the first sample). Quaternions are sign-aligned first and
/// renormalized after smoothing.
inline PoseSeries resample_pose(const PoseSeries& series, const KernelConfig& cfg) {
  cfg.validate();
  if (series.empty()) fail(ErrorCode::kEmptySeries, "resample_pose on empty series");
  const double duration = series.duration();
  if (series.size() < 2 || duration + 1e-9 < 2.0 / cfg.output_rate) {
    fail(ErrorCode::kSeriesTooShort, "recording shorter than two output periods");
  }
  const PoseSeries aligned = enforce_sign_continuity(series);
  const std::size_t n_obs = aligned.size();
  const double t0 = aligned.samples.front().t;

  std::vector<double> obs_t(n_obs);
  std::vector<std::array<double, 7>> obs(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) {
    const auto& s = aligned.samples[i];
    obs_t[i] = s.t - t0;
    const Vec4 c = s.q.coeffs();
    obs[i] = {s.p.x(), s.p.y(), s.p.z(), c(0), c(1), c(2), c(3)};
  }

  const std::size_t n_out = grid_size(duration, cfg.output_rate);
  PoseSeries out;
  out.source_rate_hz = cfg.output_rate;
  out.recording_id = series.recording_id;
  out.samples.reserve(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double t = static_cast<double>(k) / cfg.output_rate;
    std::array<double, 7> num{};
    double den = 0.0;
    for (std::size_t i = 0; i < n_obs; ++i) {
      const double w = gaussian_kernel(t - obs_t[i], cfg.sigma);
      den += w;
      for (std::size_t c = 0; c < 7; ++c) num[c] += w * obs[i][c];
    }
    if (!(den > 0.0)) {
      fail(ErrorCode::kDegenerateWeights, "kernel weights underflow at t=" + std::to_string(t));
    }
    PoseSample s;
    s.t = t;
    s.p = Vec3(num[0] / den, num[1] / den, num[2] / den);
    s.q = UnitQuaternion::unchecked(num[3] / den, Vec3(num[4] / den, num[5] / den, num[6] / den))
              .normalized();
    out.samples.push_back(s);
  }
  return out;
}

/// Centered differences in the interior, second-order one-sided stencils at
/// both ends. Output length equals input length.
inline std::vector<double> central_diff(std::span<const double> y, double dt) {
  if (y.size() < 3) fail(ErrorCode::kSeriesTooShort, "central_diff needs at least 3 samples");
  if (!(dt > 0.0)) fail(ErrorCode::kInvalidArgument, "dt must be > 0");
  const std::size_t n = y.size();
  std::vector<double> d(n);
  const double inv = 1.0 / (2.0 * dt);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) * inv;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) * inv;
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) * inv;
  return d;
}

/// Generalized velocity [pdot; omega] from a uniformly sampled pose series.
/// omega is expressed in {F} axes.
inline VelocitySeries differentiate(const PoseSeries& series) {
  if (series.size() < 3) fail(ErrorCode::kSeriesTooShort, "differentiate needs at least 3 samples");
  const std::size_t n = series.size();
  const double dt = series.samples[1].t - series.samples[0].t;
  if (!(dt > 0.0)) fail(ErrorCode::kInvalidArgument, "timestamps must increase");
  for (std::size_t k = 1; k < n; ++k) {
    const double step = series.samples[k].t - series.samples[k - 1].t;
    if (std::abs(step - dt) > 1e-9) {
      fail(ErrorCode::kInvalidArgument, "differentiate requires a uniform grid (resample first)");
    }
  }

  const PoseSeries aligned = enforce_sign_continuity(series);
  std::array<std::vector<double>, 7> channels;
  for (auto& c : channels) c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = aligned.samples[k];
    const Vec4 q = s.q.coeffs();
    channels[0][k] = s.p.x();
    channels[1][k] = s.p.y();
    channels[2][k] = s.p.z();
    for (int c = 0; c < 4; ++c) channels[3 + c][k] = q(c);
  }
  std::array<std::vector<double>, 7> rates;
  for (std::size_t c = 0; c < 7; ++c) rates[c] = central_diff(channels[c], dt);

  VelocitySeries out;
  out.rate = series.source_rate_hz > 0.0 && std::abs(series.source_rate_hz * dt - 1.0) < 1e-6
                 ? series.source_rate_hz
                 : 1.0 / dt;
  out.recording_id = series.recording_id;
  out.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    TwistSample ts;
    ts.t = aligned.samples[k].t;
    const Vec4 qdot(rates[3][k], rates[4][k], rates[5][k], rates[6][k]);
    ts.v.head<3>() = Vec3(rates[0][k], rates[1][k], rates[2][k]);
    ts.v.tail<3>() = spatial_omega(aligned.samples[k].q, qdot);
    out.samples.push_back(ts);
  }
  out.refresh_sup();
  return out;
}

/// Divides the translational and angular groups by their suprema. A group
/// whose sup is at or below `threshold` is left untouched.
inline VelocitySeries sup_normalize(const VelocitySeries& series, double threshold = kSupNormalizeThreshold) {
  VelocitySeries in = series;
  in.refresh_sup();
  const bool norm_t = in.sup_translational > threshold;
  const bool norm_a = in.sup_angular > threshold;
  if (!norm_t && !norm_a) {
    fail(ErrorCode::kDegenerateInput, "motionless recording: both velocity suprema below threshold");
  }
  for (auto& s : in.samples) {
    if (norm_t) s.v.head<3>() /= in.sup_translational;
    if (norm_a) s.v.tail<3>() /= in.sup_angular;
  }
  in.refresh_sup();
  return in;
}

}  // namespace motionseg
