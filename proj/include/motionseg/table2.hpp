// Published per-segment classification marks for the 20 complex fruit-
// detachment sequences, encoded as data. Used as the fixture for the
// evaluator's accounting and as the label rows for `generate --table2`.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "motionseg/primitives.hpp"

namespace motionseg::table2 {

/// Bit flags, one per scored approach.
enum Mark : std::uint8_t {
  kNone = 0,
  kA = 1 << 0,         // rules only
  kB = 1 << 1,         // examples only
  kC = 1 << 2,         // rules + examples
  kFeedback = 1 << 3,  // rules + examples + corrective feedback
};

struct Cell {
  PrimitiveLabel label;
  std::uint8_t marks;
};

struct Row {
  int sequence;
  bool validation;  // sequence used to give feedback
  std::vector<Cell> cells;

  std::vector<PrimitiveLabel> labels() const {
    std::vector<PrimitiveLabel> out;
    for (const auto& c : cells) out.push_back(c.label);
    return out;
  }
};

inline const std::vector<Row>& rows() {
  using L = PrimitiveLabel;
  static const std::vector<Row> kRows = {
      {1, true, {{L::kTilt, kC | kFeedback}, {L::kSlide, kB | kFeedback}}},
      {2, false, {{L::kTilt, kC}, {L::kPull, kFeedback}}},
      {3, false, {{L::kSwing, kNone}, {L::kSlide, kFeedback}}},
      {4, false, {{L::kSwing, kNone}, {L::kPull, kFeedback}}},
      {5, true, {{L::kTwist, kA | kFeedback}, {L::kPull, kFeedback}}},
      {6, false, {{L::kTwist, kC}, {L::kSlide, kC | kFeedback}}},
      {7, false, {{L::kTwist, kA | kB}, {L::kTilt, kNone}, {L::kSlide, kNone}}},
      {8, false, {{L::kSwing, kA}, {L::kTilt, kFeedback}, {L::kSlide, kFeedback}}},
      {9, false, {{L::kSwing, kC | kA}, {L::kTilt, kA}, {L::kPull, kA | kFeedback}}},
      {10, true, {{L::kTwist, kFeedback}, {L::kTilt, kFeedback}, {L::kPull, kC | kFeedback}}},
      {11, false, {{L::kTilt, kNone}, {L::kTwist, kC}, {L::kSlide, kNone}}},
      {12, false, {{L::kTilt, kFeedback}, {L::kTwist, kC}, {L::kPull, kA | kB | kFeedback}}},
      {13, false, {{L::kSwing, kC}, {L::kSwing, kA | kC}, {L::kSlide, kNone}}},
      {14, true,
       {{L::kSwing, kB | kC | kFeedback}, {L::kTwist, kB | kC | kFeedback}, {L::kPull, kC | kFeedback}}},
      {15, false, {{L::kTilt, kFeedback}, {L::kSwing, kFeedback}, {L::kSlide, kNone}}},
      {16, true, {{L::kTilt, kFeedback}, {L::kSwing, kFeedback}, {L::kPull, kC | kFeedback}}},
      {17, false, {{L::kTwist, kFeedback}, {L::kSwing, kNone}, {L::kSlide, kNone}}},
      {18, false, {{L::kTwist, kNone}, {L::kSwing, kB | kFeedback}, {L::kPull, kC | kFeedback}}},
      {19, false,
       {{L::kTwist, kB | kFeedback}, {L::kTilt, kA | kFeedback}, {L::kSwing, kA | kFeedback},
        {L::kPull, kA | kFeedback}}},
      {20, false,
       {{L::kSwing, kC}, {L::kTilt, kFeedback}, {L::kTwist, kB}, {L::kSlide, kNone}}},
  };
  return kRows;
}

}  // namespace motionseg::table2
