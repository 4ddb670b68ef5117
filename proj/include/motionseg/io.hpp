// File formats: pose recordings (CSV), velocity series (CSV) and
// segmentation results (JSON).
#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/kinematics.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/resample.hpp"

namespace motionseg::io {

inline constexpr std::string_view kRecordingHeader = "t,px,py,pz,qw,qx,qy,qz";
inline constexpr std::string_view kRecordingHeaderButton = "t,px,py,pz,qw,qx,qy,qz,button";
inline constexpr std::string_view kVelocityHeader = "index,t,v_x,v_y,v_z,w_x,w_y,w_z";

/// File name up to the first dot: "seq07.truth.json" -> "seq07".
inline std::string stem_id(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  return name.substr(0, name.find('.'));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_row(const std::string& line, const std::string& source, std::size_t line_no,
                                     char delim = ',') {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, delim)) {
    cell = trim(cell);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
      out.push_back(v);
    } catch (const std::exception&) {
      throw FormatError(source, line_no, "invalid number '" + cell + "'");
    }
  }
  return out;
}

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  std::string s(buf);
  // Avoid "-0.000..." so byte-identical outputs do not depend on the sign of zero.
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

/// Rate from the mean step, snapped to an integer when within 1e-6.
inline double infer_rate(double t0, double t1, std::size_t n) {
  if (n < 2 || !(t1 > t0)) return 0.0;
  const double r = static_cast<double>(n - 1) / (t1 - t0);
  const double rounded = std::round(r);
  return std::abs(r - rounded) < 1e-6 * std::max(1.0, r) ? rounded : r;
}

}  // namespace detail

struct Recording {
  PoseSeries pose;
  std::optional<std::vector<int>> button;  // one entry per sample
  std::optional<PoseSample> fruit_pose;    // from a "# fruit_pose:" line
};

/// Parses a recording CSV. Lines starting with '#' are comments, except
/// "# fruit_pose: px py pz qw qx qy qz" which sets the frame {F}.
inline Recording read_recording(std::istream& in, const std::string& source, double renorm_tol = 1e-3) {
  Recording rec;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> columns;
  double prev_t = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "fruit_pose:";
      const auto pos = line.find(key);
      if (pos != std::string::npos) {
        std::istringstream fs(line.substr(pos + key.size()));
        double v[7];
        for (double& x : v) {
          if (!(fs >> x)) throw FormatError(source, line_no, "fruit_pose needs 7 numbers");
        }
        try {
          rec.fruit_pose = PoseSample{0.0, Vec3(v[0], v[1], v[2]), UnitQuaternion::from_components(v[3], v[4], v[5], v[6], renorm_tol)};
        } catch (const Error& e) {
          throw FormatError(source, line_no, e.what());
        }
      }
      continue;
    }
    if (!columns) {
      if (line == kRecordingHeader) {
        columns = 8;
      } else if (line == kRecordingHeaderButton) {
        columns = 9;
        rec.button.emplace();
      } else {
        throw FormatError(source, line_no, "expected header '" + std::string(kRecordingHeaderButton) +
                                               "' (button optional), got '" + line + "'");
      }
      continue;
    }
    const auto row = detail::parse_row(line, source, line_no);
    if (row.size() != *columns) {
      throw FormatError(source, line_no, "expected " + std::to_string(*columns) + " columns, got " +
                                             std::to_string(row.size()));
    }
    if (!rec.pose.samples.empty() && !(row[0] > prev_t)) {
      throw FormatError(source, line_no, "timestamps must strictly increase");
    }
    prev_t = row[0];
    PoseSample s;
    s.t = row[0];
    s.p = Vec3(row[1], row[2], row[3]);
    try {
      s.q = UnitQuaternion::from_components(row[4], row[5], row[6], row[7], renorm_tol);
    } catch (const Error& e) {
      throw FormatError(source, line_no, e.what());
    }
    if (rec.button) {
      if (row[8] != 0.0 && row[8] != 1.0) throw FormatError(source, line_no, "button must be 0 or 1");
      rec.button->push_back(static_cast<int>(row[8]));
    }
    rec.pose.samples.push_back(s);
  }
  if (!columns) throw FormatError(source, 0, "missing header");
  if (rec.pose.size() < 2) throw FormatError(source, 0, "recording needs at least 2 samples");
  rec.pose.source_rate_hz =
      detail::infer_rate(rec.pose.samples.front().t, rec.pose.samples.back().t, rec.pose.size());
  return rec;
}

inline Recording read_recording(const std::filesystem::path& path, double renorm_tol = 1e-3) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  auto rec = read_recording(in, path.string(), renorm_tol);
  rec.pose.recording_id = stem_id(path);
  return rec;
}

inline std::string format_recording(const PoseSeries& pose, const std::vector<int>* button = nullptr) {
  std::string out(button ? kRecordingHeaderButton : kRecordingHeader);
  out += '\n';
  for (std::size_t k = 0; k < pose.size(); ++k) {
    const auto& s = pose.samples[k];
    const Vec4 q = s.q.coeffs();
    out += detail::fmt("%.6f", s.t);
    for (int a = 0; a < 3; ++a) out += "," + detail::fmt("%.9f", s.p(a));
    for (int a = 0; a < 4; ++a) out += "," + detail::fmt("%.12f", q(a));
    if (button) out += "," + std::to_string((*button)[k]);
    out += '\n';
  }
  return out;
}

/// Rising edges of the button column, as timestamps relative to the first
/// sample. A press held on the very first sample is not a transition.
inline std::vector<double> button_transitions(const Recording& rec) {
  std::vector<double> out;
  if (!rec.button) return out;
  const double t0 = rec.pose.samples.front().t;
  for (std::size_t k = 1; k < rec.button->size(); ++k) {
    if ((*rec.button)[k] == 1 && (*rec.button)[k - 1] == 0) out.push_back(rec.pose.samples[k].t - t0);
  }
  return out;
}

/// Nearest grid index for a time, ties toward the lower index.
inline std::size_t nearest_grid_index(double t, double rate) {
  const double x = t * rate;
  const double idx = std::ceil(x - 0.5 - 1e-9);
  return idx < 0.0 ? 0 : static_cast<std::size_t>(idx);
}

inline VelocitySeries read_velocity(std::istream& in, const std::string& source) {
  VelocitySeries out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kVelocityHeader) {
        throw FormatError(source, line_no, "expected header '" + std::string(kVelocityHeader) + "', got '" + line + "'");
      }
      header = true;
      continue;
    }
    const auto row = detail::parse_row(line, source, line_no);
    if (row.size() != 8) throw FormatError(source, line_no, "expected 8 columns, got " + std::to_string(row.size()));
    if (row[0] != static_cast<double>(out.samples.size())) {
      throw FormatError(source, line_no, "index column out of sequence");
    }
    if (!out.samples.empty() && !(row[1] > out.samples.back().t)) {
      throw FormatError(source, line_no, "timestamps must strictly increase");
    }
    TwistSample s;
    s.t = row[1];
    for (int a = 0; a < 6; ++a) s.v(a) = row[2 + a];
    out.samples.push_back(s);
  }
  if (!header) throw FormatError(source, 0, "missing header");
  if (out.samples.empty()) throw FormatError(source, 0, "no samples");
  out.rate = detail::infer_rate(out.samples.front().t, out.samples.back().t, out.size());
  out.refresh_sup();
  return out;
}

inline VelocitySeries read_velocity(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  auto v = read_velocity(in, path.string());
  v.recording_id = stem_id(path);
  return v;
}

inline std::string format_velocity(const VelocitySeries& series) {
  std::string out(kVelocityHeader);
  out += '\n';
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series.samples[k];
    out += std::to_string(k) + "," + detail::fmt("%.6f", s.t);
    for (int a = 0; a < 6; ++a) out += "," + detail::fmt("%.9f", s.v(a));
    out += '\n';
  }
  return out;
}

/// True when the first non-comment line is a recording header.
inline bool looks_like_recording(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    return line.rfind("t,px", 0) == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Segmentation JSON
// ---------------------------------------------------------------------------

inline nlohmann::json segmentation_to_json(const SegmentationResult& r, const std::string& recording_id,
                                           double rate) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"label", std::string(to_string(s.label))}, {"start", s.start}, {"end", s.end}});
  }
  nlohmann::json j = {{"recording_id", recording_id},
                      {"rate", rate},
                      {"series_len", r.series_len},
                      {"segments", segs},
                      {"boundaries", r.boundaries()}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

struct LoadedSegmentation {
  SegmentationResult result;
  std::string recording_id;
  double rate = 0.0;
};

inline LoadedSegmentation segmentation_from_json(const nlohmann::json& j, const std::string& source) {
  LoadedSegmentation out;
  try {
    if (!j.contains("segments")) throw FormatError(source, 0, "no 'segments' array");
    for (const auto& s : j.at("segments")) {
      out.result.segments.push_back(
          {parse_label(s.at("label").get<std::string>()), s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>()});
    }
    out.result.series_len = j.contains("series_len") ? j.at("series_len").get<std::size_t>()
                            : out.result.segments.empty() ? 0
                                                          : out.result.segments.back().end + 1;
    if (j.contains("recording_id")) out.recording_id = j.at("recording_id").get<std::string>();
    if (j.contains("rate")) out.rate = j.at("rate").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source, 0, e.what());
  }
  validate(out.result);
  return out;
}

inline LoadedSegmentation read_segmentation(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  auto out = segmentation_from_json(j, path.string());
  if (out.recording_id.empty()) out.recording_id = stem_id(path);
  return out;
}

}  // namespace motionseg::io
