// Synthetic labeled primitive motions and composite sequences with exact
// transition indices.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/kinematics.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/resample.hpp"
#include "motionseg/table2.hpp"

namespace motionseg {

struct Amplitudes {
  double translational = 0.1;  // m/s
  double angular = 0.5;        // rad/s
};

/// Tilt carries a small z translation; its peak is this fraction of the
/// translational amplitude.
inline constexpr double kTiltTranslationFraction = 0.1;

struct MotionSpec {
  std::vector<PrimitiveLabel> labels;
  /// Seconds per segment. A single entry applies to every segment.
  std::vector<double> durations{3.0};
  Amplitudes amplitude;
  double noise_std = 0.0;  // fraction of the group amplitude
  std::uint64_t seed = 0;
  double rate = 20.0;  // Hz
  std::string recording_id;

  double duration_of(std::size_t k) const { return durations.size() == 1 ? durations[0] : durations[k]; }

  void validate() const {
    if (labels.empty()) fail(ErrorCode::kInvalidArgument, "motion spec needs at least one label");
    if (durations.size() != 1 && durations.size() != labels.size()) {
      fail(ErrorCode::kInvalidArgument, "durations must have one entry or one per label");
    }
    for (double d : durations) {
      if (!(d > 0.0)) fail(ErrorCode::kInvalidArgument, "durations must be > 0");
    }
    if (!(noise_std >= 0.0)) fail(ErrorCode::kInvalidArgument, "noise_std must be >= 0");
    if (!(amplitude.translational > 0.0 && amplitude.angular > 0.0)) {
      fail(ErrorCode::kInvalidArgument, "amplitudes must be > 0");
    }
    if (!(rate > 0.0)) fail(ErrorCode::kInvalidArgument, "rate must be > 0");
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (std::llround(duration_of(k) * rate) < 2) {
        fail(ErrorCode::kInvalidArgument, "segment shorter than two samples");
      }
    }
  }
};

struct LabeledRecording {
  PoseSeries pose;
  VelocitySeries velocity;  // designed velocity (plus noise) on the pose grid
  SegmentationResult truth;
  std::vector<std::string> warnings;
};

/// Raised-cosine bell on [0, 1], zero at both ends, peak 1 at 0.5.
inline double raised_cosine(double u) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
}

namespace detail {

/// Unit-peak axis pattern of one primitive, scaled by the amplitudes.
inline Vec6 primitive_pattern(PrimitiveLabel label, const Amplitudes& amp, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  auto sign = [&] { return coin(rng) == 0 ? -1.0 : 1.0; };
  Vec6 p = Vec6::Zero();
  switch (label) {
    case PrimitiveLabel::kPull:
      p(0) = sign() * amp.translational;
      break;
    case PrimitiveLabel::kSlide: {
      std::uniform_real_distribution<double> angle(35.0, 55.0);
      const double phi = angle(rng) * std::numbers::pi / 180.0;
      p(1) = sign() * std::cos(phi) * amp.translational;
      p(2) = sign() * std::sin(phi) * amp.translational;
      break;
    }
    case PrimitiveLabel::kSwing:
      p(1) = sign() * amp.translational;
      p(5) = sign() * amp.angular;
      break;
    case PrimitiveLabel::kTilt:
      p(2) = sign() * kTiltTranslationFraction * amp.translational;
      p(4) = sign() * amp.angular;
      break;
    case PrimitiveLabel::kTwist:
      p(3) = sign() * amp.angular;
      break;
  }
  return p;
}

}  // namespace detail

/// Concatenated primitives with bell-shaped velocity profiles. Noise is
/// added in velocity space; the pose is its integral, starting at the
/// identity pose, so junctions are continuous.
inline LabeledRecording generate_sequence(const MotionSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  const std::size_t n_seg = spec.labels.size();
  std::vector<std::size_t> seg_len(n_seg);
  std::vector<std::size_t> seg_start(n_seg);
  std::vector<Vec6> patterns(n_seg);
  std::size_t total = 0;
  for (std::size_t k = 0; k < n_seg; ++k) {
    seg_len[k] = static_cast<std::size_t>(std::llround(spec.duration_of(k) * spec.rate));
    seg_start[k] = total;
    total += seg_len[k];
    patterns[k] = detail::primitive_pattern(spec.labels[k], spec.amplitude, rng);
  }
  const std::size_t n = total + 1;  // closing sample at rest

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd_t = spec.noise_std * spec.amplitude.translational;
  const double sd_a = spec.noise_std * spec.amplitude.angular;

  VelocitySeries vel;
  vel.rate = spec.rate;
  vel.recording_id = spec.recording_id;
  vel.samples.resize(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < n_seg && i >= seg_start[seg + 1]) ++seg;
    const double u = static_cast<double>(i - seg_start[seg]) / static_cast<double>(seg_len[seg]);
    Vec6 v = patterns[seg] * raised_cosine(u);
    if (spec.noise_std > 0.0) {
      for (int a = 0; a < 3; ++a) v(a) += sd_t * gauss(rng);
      for (int a = 3; a < 6; ++a) v(a) += sd_a * gauss(rng);
    }
    vel.samples[i].t = static_cast<double>(i) / spec.rate;
    vel.samples[i].v = v;
  }
  vel.refresh_sup();

  PoseSeries pose;
  pose.source_rate_hz = spec.rate;
  pose.recording_id = spec.recording_id;
  pose.samples.resize(n);
  pose.samples[0].t = 0.0;
  const double dt = 1.0 / spec.rate;
  for (std::size_t i = 1; i < n; ++i) {
    const Vec6 mid = 0.5 * (vel.samples[i - 1].v + vel.samples[i].v);
    auto& prev = pose.samples[i - 1];
    auto& cur = pose.samples[i];
    cur.t = vel.samples[i].t;
    cur.p = prev.p + dt * mid.head<3>();
    // omega is spatial ({F} axes), so the increment multiplies from the left.
    cur.q = (UnitQuaternion::exp(dt * mid.tail<3>()) * prev.q).normalized();
  }

  LabeledRecording rec;
  rec.pose = std::move(pose);
  rec.velocity = std::move(vel);
  std::vector<std::size_t> boundaries(seg_start.begin() + 1, seg_start.end());
  rec.truth = make_contiguous(boundaries, spec.labels, n);
  if (!is_terminal_label(spec.labels.back())) {
    rec.warnings.push_back("final primitive '" + std::string(to_string(spec.labels.back())) +
                           "' is neither pull nor slide");
  }
  return rec;
}

inline LabeledRecording generate_primitive(PrimitiveLabel label, double duration,
                                           const Amplitudes& amplitude, double noise_std,
                                           std::uint64_t seed, double rate) {
  MotionSpec spec;
  spec.labels = {label};
  spec.durations = {duration};
  spec.amplitude = amplitude;
  spec.noise_std = noise_std;
  spec.seed = seed;
  spec.rate = rate;
  spec.recording_id = std::string(to_string(label));
  return generate_sequence(spec);
}

struct CompositeOptions {
  std::size_t min_primitives = 2;
  std::size_t max_primitives = 4;
  double min_duration = 2.0;  // s
  double max_duration = 5.0;  // s
  double duration_quantum = 0.05;  // s, durations are multiples of this
  double noise_std = 0.0;
  double rate = 20.0;
};

/// Random grammar-valid composite: loosening primitives (swing, tilt, twist)
/// followed by exactly one detaching primitive (pull or slide), the shape of
/// every published test sequence. Consecutive repeats are allowed.
inline MotionSpec random_composite_spec(std::uint64_t seed, const CompositeOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> count(opt.min_primitives, opt.max_primitives);
  std::uniform_int_distribution<int> loosen(0, 2);
  std::uniform_int_distribution<int> detach(0, 1);
  const auto q_lo = static_cast<long long>(std::ceil(opt.min_duration / opt.duration_quantum - 1e-9));
  const auto q_hi = static_cast<long long>(std::floor(opt.max_duration / opt.duration_quantum + 1e-9));
  std::uniform_int_distribution<long long> quanta(q_lo, q_hi);

  MotionSpec spec;
  const std::size_t n = count(rng);
  constexpr PrimitiveLabel kLoosening[] = {PrimitiveLabel::kSwing, PrimitiveLabel::kTilt,
                                           PrimitiveLabel::kTwist};
  for (std::size_t k = 0; k + 1 < n; ++k) spec.labels.push_back(kLoosening[loosen(rng)]);
  spec.labels.push_back(detach(rng) == 0 ? PrimitiveLabel::kPull : PrimitiveLabel::kSlide);
  spec.durations.clear();
  for (std::size_t k = 0; k < n; ++k) {
    spec.durations.push_back(static_cast<double>(quanta(rng)) * opt.duration_quantum);
  }
  spec.noise_std = opt.noise_std;
  spec.rate = opt.rate;
  spec.seed = rng();
  spec.recording_id = "composite" + std::to_string(seed);
  return spec;
}

/// Specs for the 20 published test sequences, `seq01` ... `seq20`.
inline std::vector<MotionSpec> table2_specs(double duration, double noise_std, std::uint64_t seed,
                                            double rate) {
  std::vector<MotionSpec> specs;
  for (const auto& row : table2::rows()) {
    MotionSpec s;
    s.labels = row.labels();
    s.durations = {duration};
    s.noise_std = noise_std;
    s.seed = seed + static_cast<std::uint64_t>(row.sequence);
    s.rate = rate;
    s.recording_id = (row.sequence < 10 ? "seq0" : "seq") + std::to_string(row.sequence);
    specs.push_back(std::move(s));
  }
  return specs;
}

/// Maps a segmentation between sampling grids (nearest index, ties down).
inline SegmentationResult regrid(const SegmentationResult& truth, double from_rate, double to_rate,
                                 std::size_t to_len) {
  std::vector<std::size_t> b;
  for (std::size_t x : truth.boundaries()) {
    const double t = static_cast<double>(x) / from_rate;
    b.push_back(static_cast<std::size_t>(std::ceil(t * to_rate - 0.5 - 1e-9)));
  }
  return make_contiguous(b, truth.labels(), to_len);
}

}  // namespace motionseg
