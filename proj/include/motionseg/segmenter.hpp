// Deterministic rule engine: classifies and segments a generalized-velocity
// series into pull / slide / swing / tilt / twist by dominant axes.
//
// Axis order in every 6-vector is (v_x, v_y, v_z, w_x, w_y, w_z).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/resample.hpp"

namespace motionseg {

using AxisVector = std::array<double, 6>;

enum Axis : std::size_t { kVx = 0, kVy, kVz, kWx, kWy, kWz };

struct PrimitiveTemplate {
  PrimitiveLabel label;
  AxisVector active{};                 // weight in [0, 1] per characteristic axis
  std::array<bool, 6> suppressed{};  // axes expected near zero
};

/// One template per row of the kinematic characteristics table:
///   pull  - translation along x, no significant rotation
///   slide - translation in the y-z plane, no significant rotation
///   swing - translation along y and rotation about z
///   tilt  - minimal translation along z and rotation about y
///   twist - rotation about x, no translation
inline constexpr double kTiltVzWeight = 0.25;

inline std::vector<PrimitiveTemplate> default_templates(double tilt_vz_weight = kTiltVzWeight) {
  std::vector<PrimitiveTemplate> t(5);
  t[0].label = PrimitiveLabel::kPull;
  t[0].active[kVx] = 1.0;
  t[0].suppressed[kWx] = t[0].suppressed[kWy] = t[0].suppressed[kWz] = true;

  t[1].label = PrimitiveLabel::kSlide;
  t[1].active[kVy] = t[1].active[kVz] = 1.0;
  t[1].suppressed[kWx] = t[1].suppressed[kWy] = t[1].suppressed[kWz] = true;

  t[2].label = PrimitiveLabel::kSwing;
  t[2].active[kVy] = t[2].active[kWz] = 1.0;

  t[3].label = PrimitiveLabel::kTilt;
  t[3].active[kWy] = 1.0;
  t[3].active[kVz] = tilt_vz_weight;
  t[3].suppressed[kVx] = t[3].suppressed[kVy] = true;

  t[4].label = PrimitiveLabel::kTwist;
  t[4].active[kWx] = 1.0;
  t[4].suppressed[kVx] = t[4].suppressed[kVy] = t[4].suppressed[kVz] = true;
  return t;
}

struct SegmenterParams {
  double theta = 0.25;              // significance level on sup-normalized window means
  std::size_t window = 5;           // trailing window length, samples
  std::size_t min_segment_len = 10; // samples
  double lambda = 0.5;              // penalty on suppressed axes
  double quiet_ratio = 0.5;         // an active axis below theta*quiet_ratio may re-emerge
  std::size_t persistence = 3;      // consecutive samples at or above theta to count as emerged
  bool grammar = false;             // force the final label into {pull, slide}
  double sup_threshold = kSupNormalizeThreshold;

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) fail(ErrorCode::kInvalidArgument, "theta must be in (0, 1)");
    if (window == 0) fail(ErrorCode::kInvalidArgument, "window must be >= 1");
    if (min_segment_len == 0) fail(ErrorCode::kInvalidArgument, "min_segment_len must be >= 1");
    if (persistence == 0) fail(ErrorCode::kInvalidArgument, "persistence must be >= 1");
    if (!(sup_threshold >= 0.0)) fail(ErrorCode::kInvalidArgument, "sup_threshold must be >= 0");
    if (!(lambda >= 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
    if (!(quiet_ratio > 0.0 && quiet_ratio < 1.0)) {
      fail(ErrorCode::kInvalidArgument, "quiet_ratio must be in (0, 1)");
    }
  }
};

/// Per-axis mean absolute velocity over [start, end].
inline AxisVector segment_features(const VelocitySeries& series, std::size_t start, std::size_t end) {
  if (start > end || end >= series.size()) {
    fail(ErrorCode::kBadRange, "feature range [" + std::to_string(start) + ", " +
                                   std::to_string(end) + "] invalid for length " +
                                   std::to_string(series.size()));
  }
  AxisVector f{};
  for (std::size_t k = start; k <= end; ++k) {
    for (std::size_t a = 0; a < 6; ++a) f[a] += std::abs(series.samples[k].v(a));
  }
  const double n = static_cast<double>(end - start + 1);
  for (double& x : f) x /= n;
  return f;
}

struct Classification {
  PrimitiveLabel label;
  double score;
};

inline double template_score(const AxisVector& f, const PrimitiveTemplate& t, double lambda) {
  double active = 0.0;
  double suppressed = 0.0;
  for (std::size_t a = 0; a < 6; ++a) {
    active += t.active[a] * f[a];
    if (t.suppressed[a]) suppressed += f[a];
  }
  return active - lambda * suppressed;
}

/// Argmax of the template scores over labels accepted by `allowed`. Ties go
/// to the template listed first.
inline Classification classify_segment(const AxisVector& features,
                                       std::span<const PrimitiveTemplate> templates,
                                       double lambda = 0.5,
                                       const std::function<bool(PrimitiveLabel)>& allowed = {}) {
  bool any = false;
  for (double x : features) {
    if (x < 0.0 || !std::isfinite(x)) fail(ErrorCode::kInvalidArgument, "features must be finite and >= 0");
    any = any || x >= 1e-6;
  }
  if (!any) fail(ErrorCode::kDegenerateInput, "all features below 1e-6");

  std::optional<Classification> best;
  for (const auto& t : templates) {
    if (allowed && !allowed(t.label)) continue;
    const double s = template_score(features, t, lambda);
    if (!best || s > best->score) best = Classification{t.label, s};
  }
  if (!best) fail(ErrorCode::kInvalidArgument, "no admissible template");
  return *best;
}

namespace detail {

/// Trailing-window mean of |v| per axis.
inline std::vector<AxisVector> windowed_abs_means(const VelocitySeries& s, std::size_t window) {
  const std::size_t n = s.size();
  std::vector<AxisVector> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k + 1 >= window ? k + 1 - window : 0;
    AxisVector m{};
    for (std::size_t j = lo; j <= k; ++j) {
      for (std::size_t a = 0; a < 6; ++a) m[a] += std::abs(s.samples[j].v(a));
    }
    for (double& x : m) x /= static_cast<double>(k - lo + 1);
    out[k] = m;
  }
  return out;
}

}  // namespace detail

/// Interior segment boundaries of a sup-normalized series.
///
/// Within a segment, the first axes whose windowed mean reaches theta define
/// the segment's pattern; axes joining within min_segment_len samples of that
/// belong to the same pattern. A change is declared when, later on, an axis
/// outside the pattern reaches theta, or a pattern axis that had fallen quiet
/// (below theta * quiet_ratio) reaches it again. The boundary is then moved
/// back to the activity minimum of the involved axes, which is where the new
/// pattern starts to emerge.
inline std::vector<std::size_t> detect_changepoints(const VelocitySeries& series,
                                                    const SegmenterParams& params) {
  params.validate();
  const std::size_t n = series.size();
  const std::size_t min_len = params.min_segment_len;
  if (n < 2 * min_len) {
    fail(ErrorCode::kSeriesTooShort, "series of length " + std::to_string(n) +
                                         " shorter than twice the minimum segment length");
  }
  const auto win = detail::windowed_abs_means(series, params.window);
  const double quiet_level = params.theta * params.quiet_ratio;

  // above[k][a]: window mean held at or above theta for `persistence` samples.
  std::vector<std::array<bool, 6>> above(n);
  for (std::size_t a = 0; a < 6; ++a) {
    std::size_t run = 0;
    for (std::size_t k = 0; k < n; ++k) {
      run = win[k][a] >= params.theta ? run + 1 : 0;
      above[k][a] = run >= params.persistence;
    }
  }

  std::vector<std::size_t> boundaries;
  std::size_t seg_start = 0;
  std::array<bool, 6> active{};
  std::array<bool, 6> quiet{};
  std::optional<std::size_t> first_emergence;

  auto reset = [&] {
    active.fill(false);
    quiet.fill(false);
    first_emergence.reset();
  };

  for (std::size_t k = 0; k < n; ++k) {
    std::array<bool, 6> emerging{};
    bool any_emerging = false;
    for (std::size_t a = 0; a < 6; ++a) {
      const double m = win[k][a];
      if (above[k][a] && (!active[a] || quiet[a])) {
        emerging[a] = true;
        any_emerging = true;
      } else if (active[a] && m < quiet_level) {
        quiet[a] = true;
      }
    }
    if (!any_emerging) continue;

    auto absorb = [&] {
      for (std::size_t a = 0; a < 6; ++a) {
        if (emerging[a]) {
          active[a] = true;
          quiet[a] = false;
        }
      }
    };

    if (!first_emergence || k - *first_emergence < min_len || k < seg_start + min_len) {
      if (!first_emergence) first_emergence = k;
      absorb();
      continue;
    }

    // Locate where the new pattern starts: minimum summed |v| over the axes
    // of the old and the emerging pattern, earliest index on ties.
    const std::size_t lo = std::max(seg_start + min_len, *first_emergence + 1);
    std::size_t best = k;
    double best_activity = std::numeric_limits<double>::infinity();
    for (std::size_t j = lo; j <= k; ++j) {
      double activity = 0.0;
      for (std::size_t a = 0; a < 6; ++a) {
        if (active[a] || emerging[a]) activity += std::abs(series.samples[j].v(a));
      }
      if (activity < best_activity) {
        best_activity = activity;
        best = j;
      }
    }
    if (n - best < min_len) {
      absorb();
      continue;
    }
    boundaries.push_back(best);
    seg_start = best;
    reset();
    k = best - 1;  // rescan the new segment from its first sample
  }
  return boundaries;
}

/// sup_normalize -> detect_changepoints -> classify each span.
inline SegmentationResult segment_and_classify(const VelocitySeries& series,
                                               const SegmenterParams& params,
                                               std::span<const PrimitiveTemplate> templates) {
  const VelocitySeries normalized = sup_normalize(series, params.sup_threshold);
  const auto boundaries = detect_changepoints(normalized, params);

  std::vector<PrimitiveLabel> labels;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= boundaries.size(); ++k) {
    const bool last = k == boundaries.size();
    const std::size_t end = last ? normalized.size() - 1 : boundaries[k] - 1;
    const auto f = segment_features(normalized, start, end);
    std::function<bool(PrimitiveLabel)> allowed;
    if (last && params.grammar) allowed = is_terminal_label;
    labels.push_back(classify_segment(f, templates, params.lambda, allowed).label);
    start = end + 1;
  }
  return make_contiguous(boundaries, labels, normalized.size());
}

inline SegmentationResult segment_and_classify(const VelocitySeries& series,
                                               const SegmenterParams& params = {}) {
  const auto templates = default_templates();
  return segment_and_classify(series, params, templates);
}

}  // namespace motionseg
