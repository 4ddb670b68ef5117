// Unit-quaternion and SE(3) helpers for end-effector poses relative to the
// fruit frame {F}.
//
// Quaternions are stored scalar-first (eta, eps_x, eps_y, eps_z) and use the
// Hamilton product. The quaternion-rate Jacobian follows
//
//   J_Q(Q) = [ -eps^T ; eta*I + S(eps) ],   omega = 2 J_Q(Q)^T dQ/dt,
//
// which, with the Hamilton product, yields the angular velocity in the
// end-effector axes. Callers wanting {F} axes rotate the result with R(Q)
// (see `spatial_omega`).
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "motionseg/error.hpp"

namespace motionseg {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat43 = Eigen::Matrix<double, 4, 3>;

/// Tolerance used by `UnitQuaternion::from_components` when accepting raw
/// (e.g. file-ingested) components for renormalization.
inline constexpr double kQuaternionIngestTolerance = 1e-3;
/// Tolerance used by operations that require an already-unit quaternion.
inline constexpr double kQuaternionUnitTolerance = 1e-6;

class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  /// Renormalizes when |norm - 1| <= tolerance, throws NonUnitQuaternion
  /// otherwise.
  static UnitQuaternion from_components(double eta, double x, double y, double z,
                                        double tolerance = kQuaternionIngestTolerance) {
    const double n = std::sqrt(eta * eta + x * x + y * y + z * z);
    if (!std::isfinite(n) || std::abs(n - 1.0) > tolerance) {
      fail(ErrorCode::kNonUnitQuaternion,
           "quaternion norm " + std::to_string(n) + " outside renormalization tolerance");
    }
    return unchecked(eta / n, Vec3(x / n, y / n, z / n));
  }

  static UnitQuaternion from_coeffs(const Vec4& c, double tolerance = kQuaternionIngestTolerance) {
    return from_components(c(0), c(1), c(2), c(3), tolerance);
  }

  /// No normalization and no check. Used for tests of the error paths and
  /// for values that are unit by construction.
  static UnitQuaternion unchecked(double eta, const Vec3& eps) {
    UnitQuaternion q;
    q.eta_ = eta;
    q.eps_ = eps;
    return q;
  }

  static UnitQuaternion identity() { return {}; }

  /// Rotation of `angle` radians about `axis` (normalized internally).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) return identity();
    return unchecked(std::cos(0.5 * angle), axis / n * std::sin(0.5 * angle));
  }

  /// Exponential map of a rotation vector (axis * angle).
  static UnitQuaternion exp(const Vec3& rotation_vector) {
    const double angle = rotation_vector.norm();
    if (angle < 1e-12) {
      return unchecked(1.0, 0.5 * rotation_vector).normalized();
    }
    return from_axis_angle(rotation_vector, angle);
  }

  double eta() const { return eta_; }
  const Vec3& eps() const { return eps_; }
  Vec4 coeffs() const { return Vec4(eta_, eps_.x(), eps_.y(), eps_.z()); }

  double norm() const { return std::sqrt(eta_ * eta_ + eps_.squaredNorm()); }
  bool is_unit(double tolerance = kQuaternionUnitTolerance) const {
    return std::abs(norm() - 1.0) <= tolerance;
  }

  UnitQuaternion normalized() const {
    const double n = norm();
    return unchecked(eta_ / n, eps_ / n);
  }
  UnitQuaternion conjugate() const { return unchecked(eta_, -eps_); }
  UnitQuaternion operator-() const { return unchecked(-eta_, -eps_); }

  double dot(const UnitQuaternion& o) const { return eta_ * o.eta_ + eps_.dot(o.eps_); }

  /// Hamilton product.
  UnitQuaternion operator*(const UnitQuaternion& o) const {
    return unchecked(eta_ * o.eta_ - eps_.dot(o.eps_),
                     eta_ * o.eps_ + o.eta_ * eps_ + eps_.cross(o.eps_));
  }

  /// Rotation matrix R(Q); maps end-effector axes to {F} axes.
  Mat3 rotation_matrix() const {
    const double w = eta_, x = eps_.x(), y = eps_.y(), z = eps_.z();
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
  }

  Vec3 rotate(const Vec3& v) const { return rotation_matrix() * v; }

 private:
  double eta_ = 1.0;
  Vec3 eps_ = Vec3::Zero();
};

struct PoseSample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
};

struct PoseSeries {
  std::vector<PoseSample> samples;
  double source_rate_hz = 0.0;
  std::string recording_id;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  /// Duration from first to last timestamp.
  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

struct TwistSample {
  double t = 0.0;
  Vec6 v = Vec6::Zero();  // [pdot; omega]
};

/// Throws unless timestamps strictly increase, there are at least two
/// samples, and every quaternion is unit-norm.
inline void validate(const PoseSeries& series) {
  if (series.size() < 2) fail(ErrorCode::kSeriesTooShort, "pose series needs at least 2 samples");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series.samples[k];
    if (!std::isfinite(s.t) || !s.p.allFinite()) {
      fail(ErrorCode::kInvalidArgument, "non-finite pose sample at index " + std::to_string(k));
    }
    if (!s.q.is_unit()) {
      fail(ErrorCode::kNonUnitQuaternion, "sample " + std::to_string(k));
    }
    if (k > 0 && !(s.t > series.samples[k - 1].t)) {
      fail(ErrorCode::kInvalidArgument,
           "timestamps not strictly increasing at index " + std::to_string(k));
    }
  }
}

/// S(u), the matrix with S(u) w = u x w.
inline Mat3 skew(const Vec3& u) {
  Mat3 s;
  s << 0.0, -u.z(), u.y(),
       u.z(), 0.0, -u.x(),
       -u.y(), u.x(), 0.0;
  return s;
}

inline void require_unit(const UnitQuaternion& q) {
  if (!q.is_unit()) {
    fail(ErrorCode::kNonUnitQuaternion, "norm " + std::to_string(q.norm()));
  }
}

/// J_Q(Q): maps angular velocity to quaternion rate, dQ/dt = 1/2 J_Q omega.
inline Mat43 jq_matrix(const UnitQuaternion& q) {
  require_unit(q);
  Mat43 j;
  j.row(0) = -q.eps().transpose();
  j.bottomRows<3>() = q.eta() * Mat3::Identity() + skew(q.eps());
  return j;
}

/// omega = 2 J_Q(Q)^T dQ/dt.
inline Vec3 quat_rate_to_omega(const UnitQuaternion& q, const Vec4& qdot) {
  return 2.0 * jq_matrix(q).transpose() * qdot;
}

/// dQ/dt = 1/2 J_Q(Q) omega; inverse of `quat_rate_to_omega` on the tangent
/// space.
inline Vec4 omega_to_quat_rate(const UnitQuaternion& q, const Vec3& omega) {
  return 0.5 * jq_matrix(q) * omega;
}

/// Angular velocity in {F} axes from a quaternion and its rate.
inline Vec3 spatial_omega(const UnitQuaternion& q, const Vec4& qdot) {
  return q.rotation_matrix() * quat_rate_to_omega(q, qdot);
}

/// Re-expresses every sample relative to `frame`: p' = R_f^T (p - p_f),
/// q' = q_f^* q.
inline PoseSeries express_in_frame(const PoseSeries& raw, const PoseSample& frame) {
  if (raw.empty()) fail(ErrorCode::kEmptySeries, "express_in_frame on empty series");
  require_unit(frame.q);
  const Mat3 rt = frame.q.rotation_matrix().transpose();
  const UnitQuaternion qc = frame.q.conjugate();
  PoseSeries out;
  out.source_rate_hz = raw.source_rate_hz;
  out.recording_id = raw.recording_id;
  out.samples.reserve(raw.size());
  for (const auto& s : raw.samples) {
    out.samples.push_back({s.t, rt * (s.p - frame.p), (qc * s.q).normalized()});
  }
  return out;
}

/// Inverse of `express_in_frame`: maps {F}-relative samples back to the
/// frame in which `frame` itself is expressed.
inline PoseSeries apply_frame(const PoseSeries& relative, const PoseSample& frame) {
  if (relative.empty()) fail(ErrorCode::kEmptySeries, "apply_frame on empty series");
  require_unit(frame.q);
  const Mat3 r = frame.q.rotation_matrix();
  PoseSeries out;
  out.source_rate_hz = relative.source_rate_hz;
  out.recording_id = relative.recording_id;
  out.samples.reserve(relative.size());
  for (const auto& s : relative.samples) {
    out.samples.push_back({s.t, frame.p + r * s.p, (frame.q * s.q).normalized()});
  }
  return out;
}

/// Flips quaternion signs so consecutive samples have non-negative dot
/// product. The represented rotations are unchanged.
inline PoseSeries enforce_sign_continuity(const PoseSeries& series) {
  PoseSeries out = series;
  for (std::size_t k = 1; k < out.samples.size(); ++k) {
    if (out.samples[k].q.dot(out.samples[k - 1].q) < 0.0) {
      out.samples[k].q = -out.samples[k].q;
    }
  }
  return out;
}

}  // namespace motionseg
