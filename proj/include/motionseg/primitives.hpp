// Primitive labels and segmentation results shared by the segmenter, the
// LLM harness and the evaluator.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionseg/error.hpp"

namespace motionseg {

/// Declaration order is the tie-break order of the rule engine.
enum class PrimitiveLabel { kPull = 0, kSlide, kSwing, kTilt, kTwist };

inline constexpr std::array<PrimitiveLabel, 5> kAllLabels = {
    PrimitiveLabel::kPull, PrimitiveLabel::kSlide, PrimitiveLabel::kSwing, PrimitiveLabel::kTilt,
    PrimitiveLabel::kTwist};

inline constexpr std::size_t index_of(PrimitiveLabel label) { return static_cast<std::size_t>(label); }

inline std::string_view to_string(PrimitiveLabel label) {
  switch (label) {
    case PrimitiveLabel::kPull: return "pull";
    case PrimitiveLabel::kSlide: return "slide";
    case PrimitiveLabel::kSwing: return "swing";
    case PrimitiveLabel::kTilt: return "tilt";
    case PrimitiveLabel::kTwist: return "twist";
  }
  return "?";
}

inline std::optional<PrimitiveLabel> try_parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (PrimitiveLabel l : kAllLabels) {
    if (lower == to_string(l)) return l;
  }
  return std::nullopt;
}

/// Case-insensitive; throws UnknownLabel.
inline PrimitiveLabel parse_label(std::string_view text) {
  if (auto l = try_parse_label(text)) return *l;
  fail(ErrorCode::kUnknownLabel, "'" + std::string(text) + "' is not a primitive label");
}

/// Pull and slide displace the fruit from the branch, so one of them ends
/// every complete detachment.
inline bool is_terminal_label(PrimitiveLabel label) {
  return label == PrimitiveLabel::kPull || label == PrimitiveLabel::kSlide;
}

struct Segment {
  PrimitiveLabel label = PrimitiveLabel::kPull;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  std::size_t length() const { return end - start + 1; }
  double midpoint() const { return 0.5 * (static_cast<double>(start) + static_cast<double>(end)); }
  /// Each index owns [i - 0.5, i + 0.5), so adjacent segments leave no gap.
  bool contains(double index) const {
    return index >= static_cast<double>(start) - 0.5 && index < static_cast<double>(end) + 0.5;
  }

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::size_t series_len = 0;
  /// Non-fatal findings (e.g. gaps between parsed segments). Not part of
  /// equality.
  std::vector<std::string> warnings;

  bool empty() const { return segments.empty(); }

  /// Start indices of segments 2..n.
  std::vector<std::size_t> boundaries() const {
    std::vector<std::size_t> b;
    for (std::size_t k = 1; k < segments.size(); ++k) b.push_back(segments[k].start);
    return b;
  }

  std::vector<PrimitiveLabel> labels() const {
    std::vector<PrimitiveLabel> out;
    for (const auto& s : segments) out.push_back(s.label);
    return out;
  }

  /// True when segments tile [0, series_len - 1] with no gaps.
  bool is_contiguous() const {
    if (segments.empty() || segments.front().start != 0) return false;
    for (std::size_t k = 1; k < segments.size(); ++k) {
      if (segments[k].start != segments[k - 1].end + 1) return false;
    }
    return segments.back().end + 1 == series_len;
  }

  friend bool operator==(const SegmentationResult& a, const SegmentationResult& b) {
    return a.segments == b.segments && a.series_len == b.series_len;
  }
};

/// Throws MalformedRange / OverlapError / BadRange when the result breaks
/// ordering or range invariants.
inline void validate(const SegmentationResult& r) {
  for (std::size_t k = 0; k < r.segments.size(); ++k) {
    const auto& s = r.segments[k];
    if (s.start > s.end) {
      fail(ErrorCode::kMalformedRange,
           "segment " + std::to_string(k) + " has start > end");
    }
    if (s.end >= r.series_len) {
      fail(ErrorCode::kBadRange, "segment " + std::to_string(k) + " ends past series length");
    }
    if (k > 0) {
      const auto& prev = r.segments[k - 1];
      if (s.start <= prev.start) fail(ErrorCode::kOverlapError, "start indices not strictly increasing");
      if (s.start <= prev.end) fail(ErrorCode::kOverlapError, "segments overlap");
    }
  }
}

/// Builds a contiguous result from interior boundaries and per-segment labels.
inline SegmentationResult make_contiguous(const std::vector<std::size_t>& boundaries,
                                          const std::vector<PrimitiveLabel>& labels,
                                          std::size_t series_len) {
  if (labels.size() != boundaries.size() + 1) {
    fail(ErrorCode::kInvalidArgument, "need exactly one label per segment");
  }
  SegmentationResult r;
  r.series_len = series_len;
  std::size_t start = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const std::size_t end = k < boundaries.size() ? boundaries[k] - 1 : series_len - 1;
    r.segments.push_back({labels[k], start, end});
    start = end + 1;
  }
  validate(r);
  return r;
}

}  // namespace motionseg
