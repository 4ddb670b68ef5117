// Scoring of predicted segmentations against ground truth: per-primitive
// label matches and signed boundary offsets, aggregated per approach.
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/table2.hpp"

namespace motionseg::eval {

struct MatchOutcome {
  std::vector<bool> matched;                     // one per truth segment
  std::vector<std::optional<std::size_t>> partner;  // predicted index per truth segment
  std::size_t false_positives = 0;               // predicted segments never consumed
};

/// Truth segment k is matched by the first unconsumed predicted segment (in
/// chronological order) with the same label whose midpoint lies inside it.
inline MatchOutcome match_detail(const SegmentationResult& truth, const SegmentationResult& predicted) {
  MatchOutcome out;
  out.matched.assign(truth.segments.size(), false);
  out.partner.assign(truth.segments.size(), std::nullopt);
  std::vector<bool> used(predicted.segments.size(), false);
  for (std::size_t k = 0; k < truth.segments.size(); ++k) {
    const auto& t = truth.segments[k];
    for (std::size_t j = 0; j < predicted.segments.size(); ++j) {
      const auto& p = predicted.segments[j];
      if (used[j] || p.label != t.label || !t.contains(p.midpoint())) continue;
      used[j] = true;
      out.matched[k] = true;
      out.partner[k] = j;
      break;
    }
  }
  out.false_positives = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return out;
}

inline std::vector<bool> match_primitives(const SegmentationResult& truth, const SegmentationResult& predicted) {
  return match_detail(truth, predicted).matched;
}

/// predicted.start - truth.start for every matched pair, in samples.
inline std::vector<long long> boundary_errors(const SegmentationResult& truth, const SegmentationResult& predicted) {
  const auto m = match_detail(truth, predicted);
  std::vector<long long> offsets;
  for (std::size_t k = 0; k < truth.segments.size(); ++k) {
    if (!m.partner[k]) continue;
    offsets.push_back(static_cast<long long>(predicted.segments[*m.partner[k]].start) -
                      static_cast<long long>(truth.segments[k].start));
  }
  return offsets;
}

struct SequenceEval {
  std::string sequence_id;
  SegmentationResult truth;
  SegmentationResult predicted;
  std::vector<bool> matches;
  std::vector<long long> offsets;  // samples
  double rate = 0.0;               // Hz, 0 when unknown
  bool validation = false;
  std::size_t false_positives = 0;

  std::vector<double> offsets_seconds() const {
    std::vector<double> s;
    if (rate <= 0.0) return s;
    for (long long o : offsets) s.push_back(static_cast<double>(o) / rate);
    return s;
  }
};

inline SequenceEval evaluate_sequence(std::string id, SegmentationResult truth, SegmentationResult predicted,
                                      double rate, bool validation = false) {
  SequenceEval e;
  const auto m = match_detail(truth, predicted);
  e.sequence_id = std::move(id);
  e.matches = m.matched;
  e.false_positives = m.false_positives;
  e.offsets = boundary_errors(truth, predicted);
  e.truth = std::move(truth);
  e.predicted = std::move(predicted);
  e.rate = rate;
  e.validation = validation;
  return e;
}

struct QuartileSummary {
  bool empty = true;
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Linear interpolation between order statistics at position p * (n - 1).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline QuartileSummary error_summary(std::vector<double> values) {
  QuartileSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.empty = false;
  s.count = values.size();
  s.min = values.front();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  s.max = values.back();
  return s;
}

enum class DenominatorPolicy { kAllSequences, kExcludeValidation };

struct ApproachScore {
  std::string approach;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  std::size_t sequences = 0;
  std::size_t false_positives = 0;
  QuartileSummary offsets_samples;
  QuartileSummary offsets_seconds;
  QuartileSummary abs_offsets_samples;
  QuartileSummary abs_offsets_seconds;

  /// "11 / 56 (19%)"; the percentage is truncated.
  std::string ratio_text() const {
    const auto pct = static_cast<long long>(std::floor(100.0 * accuracy + 1e-9));
    return std::to_string(correct) + " / " + std::to_string(total) + " (" + std::to_string(pct) + "%)";
  }
};

/// Sums matches over the scored sequences. With kExcludeValidation the
/// sequences used to give feedback are left out of numerator and
/// denominator.
inline ApproachScore aggregate(const std::vector<SequenceEval>& evals, DenominatorPolicy policy,
                               std::string approach = "oracle") {
  ApproachScore s;
  s.approach = std::move(approach);
  std::vector<double> samples, seconds, abs_samples, abs_seconds;
  for (const auto& e : evals) {
    if (policy == DenominatorPolicy::kExcludeValidation && e.validation) continue;
    ++s.sequences;
    s.total += e.matches.size();
    s.correct += static_cast<std::size_t>(std::count(e.matches.begin(), e.matches.end(), true));
    s.false_positives += e.false_positives;
    for (long long o : e.offsets) {
      samples.push_back(static_cast<double>(o));
      abs_samples.push_back(std::abs(static_cast<double>(o)));
    }
    for (double o : e.offsets_seconds()) {
      seconds.push_back(o);
      abs_seconds.push_back(std::abs(o));
    }
  }
  if (s.sequences == 0) fail(ErrorCode::kEmptyEvalSet, "no sequences to aggregate");
  s.accuracy = s.total == 0 ? 0.0 : static_cast<double>(s.correct) / static_cast<double>(s.total);
  s.offsets_samples = error_summary(std::move(samples));
  s.offsets_seconds = error_summary(std::move(seconds));
  s.abs_offsets_samples = error_summary(std::move(abs_samples));
  s.abs_offsets_seconds = error_summary(std::move(abs_seconds));
  return s;
}

struct ApproachEvals {
  std::string approach;
  DenominatorPolicy policy = DenominatorPolicy::kAllSequences;
  std::vector<SequenceEval> sequences;
};

struct EvalReport {
  std::vector<ApproachEvals> runs;
  std::vector<ApproachScore> scores;
};

inline EvalReport build_report(std::vector<ApproachEvals> runs) {
  EvalReport r;
  for (const auto& run : runs) r.scores.push_back(aggregate(run.sequences, run.policy, run.approach));
  r.runs = std::move(runs);
  return r;
}

inline nlohmann::json to_json(const QuartileSummary& q) {
  if (q.empty) return {{"empty", true}, {"count", 0}};
  return {{"empty", false}, {"count", q.count}, {"min", q.min},   {"q1", q.q1},
          {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

inline nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["approaches"] = nlohmann::json::array();
  for (const auto& s : report.scores) {
    j["approaches"].push_back({{"approach", s.approach},
                               {"correct", s.correct},
                               {"total", s.total},
                               {"accuracy", s.accuracy},
                               {"sequences", s.sequences},
                               {"false_positives", s.false_positives},
                               {"boundary_error_samples", to_json(s.offsets_samples)},
                               {"boundary_error_seconds", to_json(s.offsets_seconds)},
                               {"abs_boundary_error_samples", to_json(s.abs_offsets_samples)},
                               {"abs_boundary_error_seconds", to_json(s.abs_offsets_seconds)}});
  }
  j["sequences"] = nlohmann::json::array();
  for (const auto& run : report.runs) {
    for (const auto& e : run.sequences) {
      nlohmann::json labels = nlohmann::json::array();
      for (const auto& seg : e.truth.segments) labels.push_back(std::string(to_string(seg.label)));
      j["sequences"].push_back({{"approach", run.approach},
                                {"sequence_id", e.sequence_id},
                                {"validation", e.validation},
                                {"truth_labels", labels},
                                {"matches", e.matches},
                                {"boundary_offsets_samples", e.offsets},
                                {"boundary_offsets_seconds", e.offsets_seconds()}});
    }
  }
  return j;
}

/// Sequence x segment grid; each cell lists the approaches that got the
/// segment right, "-" when none did. Validation sequences are starred.
inline std::string format_table(const EvalReport& report) {
  struct Row {
    const SequenceEval* seq = nullptr;
    std::vector<std::string> tags;
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& run : report.runs) {
    for (const auto& e : run.sequences) {
      auto [it, inserted] = rows.try_emplace(e.sequence_id);
      if (inserted) {
        order.push_back(e.sequence_id);
        it->second.seq = &e;
        it->second.tags.assign(e.matches.size(), "");
      }
      for (std::size_t k = 0; k < e.matches.size() && k < it->second.tags.size(); ++k) {
        if (!e.matches[k]) continue;
        auto& tag = it->second.tags[k];
        tag += tag.empty() ? run.approach : "," + run.approach;
      }
    }
  }
  std::size_t max_segments = 0;
  for (const auto& [id, row] : rows) max_segments = std::max(max_segments, row.tags.size());

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s", "Seq");
  out << buf;
  for (std::size_t k = 0; k < max_segments; ++k) {
    std::snprintf(buf, sizeof buf, " | %-26s", ("Segment " + std::to_string(k + 1)).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& id : order) {
    const auto& row = rows.at(id);
    std::snprintf(buf, sizeof buf, "%-10s", (id + (row.seq->validation ? " *" : "")).c_str());
    out << buf;
    for (std::size_t k = 0; k < max_segments; ++k) {
      std::string cell = "--";
      if (k < row.seq->truth.segments.size()) {
        cell = std::string(to_string(row.seq->truth.segments[k].label)) + " [" +
               (row.tags[k].empty() ? "-" : row.tags[k]) + "]";
      }
      std::snprintf(buf, sizeof buf, " | %-26s", cell.c_str());
      out << buf;
    }
    out << '\n';
  }
  for (const auto& s : report.scores) out << s.approach << ": " << s.ratio_text() << '\n';
  out << "* validation sequence (excluded where feedback is scored)\n";
  return out.str();
}

/// approach,sequence_id,segment,offset_samples,offset_seconds
inline std::string format_offsets_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "approach,sequence_id,segment,offset_samples,offset_seconds\n";
  char buf[64];
  for (const auto& run : report.runs) {
    for (const auto& e : run.sequences) {
      const auto m = match_detail(e.truth, e.predicted);
      std::size_t i = 0;
      for (std::size_t k = 0; k < m.partner.size(); ++k) {
        if (!m.partner[k]) continue;
        const long long o = e.offsets[i++];
        std::snprintf(buf, sizeof buf, "%.6f", e.rate > 0.0 ? static_cast<double>(o) / e.rate : 0.0);
        out << run.approach << ',' << e.sequence_id << ',' << (k + 1) << ',' << o << ','
            << (e.rate > 0.0 ? buf : "") << '\n';
      }
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Published marks as evaluation fixture
// ---------------------------------------------------------------------------

/// Per-sequence evaluations reconstructed from the published marks of one
/// approach. Truth segments carry the published labels on placeholder
/// one-sample ranges; no predictions or offsets are available.
inline std::vector<SequenceEval> table2_evals(table2::Mark approach) {
  std::vector<SequenceEval> out;
  for (const auto& row : table2::rows()) {
    SequenceEval e;
    e.sequence_id = (row.sequence < 10 ? "seq0" : "seq") + std::to_string(row.sequence);
    e.validation = row.validation;
    for (std::size_t k = 0; k < row.cells.size(); ++k) {
      e.truth.segments.push_back({row.cells[k].label, k, k});
      e.matches.push_back((row.cells[k].marks & approach) != 0);
    }
    e.truth.series_len = row.cells.size();
    out.push_back(std::move(e));
  }
  return out;
}

inline EvalReport table2_report() {
  return build_report({
      {"A", DenominatorPolicy::kAllSequences, table2_evals(table2::kA)},
      {"B", DenominatorPolicy::kAllSequences, table2_evals(table2::kB)},
      {"C", DenominatorPolicy::kAllSequences, table2_evals(table2::kC)},
      {"feedback", DenominatorPolicy::kExcludeValidation, table2_evals(table2::kFeedback)},
  });
}

}  // namespace motionseg::eval
