// Prompt construction for the three priming regimes (rules only, examples
// only, rules + examples, optionally with corrective feedback), a pluggable
// chat-completion client with retries, and parsing of the
// `label (Index a–b)` segmentation format.
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/resample.hpp"

namespace motionseg::llm {

// ---------------------------------------------------------------------------
// Approaches and prompt bundles
// ---------------------------------------------------------------------------

enum class ApproachKind { kRulesOnly, kExamplesOnly, kRulesAndExamples };

struct Approach {
  ApproachKind kind = ApproachKind::kRulesOnly;
  bool with_feedback = false;

  bool uses_rules() const { return kind != ApproachKind::kExamplesOnly; }
  bool uses_examples() const { return kind != ApproachKind::kRulesOnly; }

  std::string name() const {
    std::string n = kind == ApproachKind::kRulesOnly      ? "A"
                    : kind == ApproachKind::kExamplesOnly ? "B"
                                                          : "C";
    return with_feedback ? n + "+feedback" : n;
  }
};

/// Accepts a/b/c (any case); "feedback" is C with feedback.
inline Approach parse_approach(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "a") return {ApproachKind::kRulesOnly, false};
  if (s == "b") return {ApproachKind::kExamplesOnly, false};
  if (s == "c") return {ApproachKind::kRulesAndExamples, false};
  if (s == "feedback") return {ApproachKind::kRulesAndExamples, true};
  fail(ErrorCode::kInvalidArgument, "unknown approach '" + std::string(text) + "' (expected a, b, c or feedback)");
}

inline constexpr std::size_t kExamplesPerLabel = 5;
inline constexpr std::size_t kDefaultMaxRows = 400;

struct ExampleAttachment {
  PrimitiveLabel label;
  VelocitySeries series;
};

struct PromptBundle {
  Approach approach;
  std::string system_text;
  std::vector<ExampleAttachment> example_attachments;
  VelocitySeries query_series;
  std::vector<std::string> feedback_notes;
};

/// The five kinematic-characteristics phrases embedded by the rules template.
inline const std::array<std::string_view, 5>& rule_phrases() {
  static const std::array<std::string_view, 5> kPhrases = {
      "Translation along x-axis, without significant rotation",
      "Translation on the y-z plane, without significant rotation",
      "Translation along the y-axis and rotation around the z-axis",
      "Minimal translation z-axis and rotation around y-axis",
      "No translation, but rotation around x-axis",
  };
  return kPhrases;
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

/// Plain-text prompt pieces with `{{name}}` placeholders. Each piece maps to
/// `<name>.txt` in a prompt directory.
struct PromptTemplates {
  std::string preamble;
  std::string rules;
  std::string examples_intro;
  std::string segmentation;
  std::string output_format;
  std::string feedback;
  std::string example;
  std::string query;

  static PromptTemplates defaults() {
    PromptTemplates t;
    t.preamble =
        "You analyze demonstrations of robotic fruit picking. Each recording is a time series of "
        "the generalized velocity of the robot end-effector, expressed in a frame fixed at the "
        "initial pose of the fruit. Columns: sample index, time t in seconds, translational "
        "velocity v_x, v_y, v_z in m/s and angular velocity w_x, w_y, w_z in rad/s. Every "
        "recording is a chronological sequence of the primitive actions {{primitive_list}}.\n";
    t.rules =
        "Kinematic characteristics of the primitive actions:\n"
        "- pull: Translation along x-axis, without significant rotation\n"
        "- slide: Translation on the y-z plane, without significant rotation\n"
        "- swing: Translation along the y-axis and rotation around the z-axis\n"
        "- tilt: Minimal translation z-axis and rotation around y-axis\n"
        "- twist: No translation, but rotation around x-axis\n";
    t.examples_intro =
        "You will receive {{example_count}} labeled example recordings, {{examples_per_label}} "
        "for each primitive action. Each example contains exactly one primitive. Infer the "
        "characteristic velocity pattern of every primitive from them.\n";
    t.segmentation =
        "Classify and segment the query recording by following the velocity signals over time "
        "and looking for changes in the dominant axes. Start each segment at the earliest "
        "significant change in either translational or angular velocity, i.e. where the "
        "characteristic pattern of that primitive first appears. Order the segments by start "
        "index.\n";
    t.output_format =
        "Reply with a single line listing every segment as `label (Index start–end)`, "
        "separated by commas, using the sample indices of the query, for example: "
        "twist (Index 0–62), tilt (Index 63–112), pull (Index 113–170). Use only the labels "
        "{{primitive_list}}. Segments must cover the whole recording without gaps or overlaps.\n";
    t.feedback =
        "Corrections from earlier validation recordings. Do not repeat these mistakes:\n"
        "{{notes}}";
    t.example =
        "Example {{example_number}} of {{example_count}}: {{label}}\n"
        "```csv\n{{table}}```\n";
    t.query =
        "Segment the following recording ({{sample_count}} samples at {{rate}} Hz):\n"
        "```csv\n{{table}}```\n";
    return t;
  }

  /// Loads `<name>.txt` files from `dir`; missing files keep the default.
  static PromptTemplates load(const std::filesystem::path& dir) {
    PromptTemplates t = defaults();
    auto read = [&](const char* name, std::string& field) {
      const auto path = dir / (std::string(name) + ".txt");
      if (!std::filesystem::exists(path)) return;
      std::ifstream in(path, std::ios::binary);
      if (!in) fail(ErrorCode::kIoError, "cannot read " + path.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      field = ss.str();
    };
    read("preamble", t.preamble);
    read("rules", t.rules);
    read("examples_intro", t.examples_intro);
    read("segmentation", t.segmentation);
    read("output_format", t.output_format);
    read("feedback", t.feedback);
    read("example", t.example);
    read("query", t.query);
    return t;
  }
};

/// Replaces every `{{name}}`; an unknown placeholder throws InvalidArgument.
inline std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      fail(ErrorCode::kInvalidArgument, "unterminated placeholder in prompt template");
    }
    out.append(text.substr(pos, open - pos));
    const std::string key(text.substr(open + 2, close - open - 2));
    const auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::kInvalidArgument, "unknown placeholder {{" + key + "}}");
    out.append(it->second);
    pos = close + 2;
  }
}

inline std::string primitive_list() {
  std::string s;
  for (std::size_t i = 0; i < kAllLabels.size(); ++i) {
    if (i > 0) s += ", ";
    s += to_string(kAllLabels[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Series tables
// ---------------------------------------------------------------------------

inline constexpr std::string_view kSeriesHeader = "index,t,v_x,v_y,v_z,w_x,w_y,w_z";

namespace detail {
inline std::string fixed4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}
}  // namespace detail

/// Header plus one row per sample, four decimals, comma-separated.
inline std::string serialize_series(const VelocitySeries& series, std::size_t max_rows = kDefaultMaxRows) {
  if (series.empty()) fail(ErrorCode::kEmptySeries, "cannot serialize an empty series");
  if (series.size() > max_rows) {
    fail(ErrorCode::kSeriesTooLong, std::to_string(series.size()) + " rows exceed the limit of " +
                                        std::to_string(max_rows));
  }
  std::string out(kSeriesHeader);
  out += '\n';
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series.samples[k];
    out += std::to_string(k);
    out += ',';
    out += detail::fixed4(s.t);
    for (int a = 0; a < 6; ++a) {
      out += ',';
      out += detail::fixed4(s.v(a));
    }
    out += '\n';
  }
  return out;
}

/// Inverse of `serialize_series` (up to the four-decimal quantization).
inline VelocitySeries parse_series_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  VelocitySeries out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("```", 0) == 0) continue;
    if (!header_seen) {
      if (line != kSeriesHeader) throw FormatError("series table", line_no, "unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<double> fields;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("series table", line_no, "bad number '" + cell + "'");
      }
    }
    if (fields.size() != 8) throw FormatError("series table", line_no, "expected 8 columns");
    TwistSample s;
    s.t = fields[1];
    for (int a = 0; a < 6; ++a) s.v(a) = fields[2 + a];
    out.samples.push_back(s);
  }
  if (!header_seen) throw FormatError("series table", 0, "missing header");
  if (out.samples.size() >= 2) out.rate = 1.0 / (out.samples[1].t - out.samples[0].t);
  out.refresh_sup();
  return out;
}

// ---------------------------------------------------------------------------
// Segment text format
// ---------------------------------------------------------------------------

/// Canonical `label (Index a–b), ...` with an en-dash.
inline std::string format_segments(const SegmentationResult& result) {
  std::string out;
  for (std::size_t k = 0; k < result.segments.size(); ++k) {
    const auto& s = result.segments[k];
    if (k > 0) out += ", ";
    out += to_string(s.label);
    out += " (Index " + std::to_string(s.start) + "–" + std::to_string(s.end) + ")";
  }
  return out;
}

/// Extracts every `label (Index a–b)` occurrence. Separators may be a hyphen,
/// en-dash, em-dash or "to"; labels are case-insensitive. Gaps are reported
/// as warnings; unknown labels, a > b and overlaps throw.
inline SegmentationResult parse_segments(std::string_view text) {
  static const std::regex kPattern(
      "([A-Za-z]+)[*_]*\\s*\\(\\s*Index(?:es)?\\s*:?\\s*(\\d+)\\s*(?:-|\xE2\x80\x93|\xE2\x80\x94|to)\\s*(\\d+)\\s*\\)",
      std::regex::ECMAScript | std::regex::icase);
  const std::string s(text);
  std::vector<Segment> segs;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPattern); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const PrimitiveLabel label = parse_label(m[1].str());
    std::size_t a = 0;
    std::size_t b = 0;
    try {
      a = std::stoull(m[2].str());
      b = std::stoull(m[3].str());
    } catch (const std::out_of_range&) {
      fail(ErrorCode::kMalformedRange, "index out of range in '" + m.str() + "'");
    }
    if (a > b) fail(ErrorCode::kMalformedRange, "start after end in '" + m.str() + "'");
    segs.push_back({label, a, b});
  }
  if (segs.empty()) fail(ErrorCode::kNoSegmentsFound, "no 'label (Index a-b)' entries in reply");

  std::stable_sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.start < y.start; });
  SegmentationResult r;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (k > 0 && segs[k].start <= segs[k - 1].end) {
      fail(ErrorCode::kOverlapError, "segments " + std::to_string(k - 1) + " and " + std::to_string(k) + " overlap");
    }
  }
  if (segs.front().start != 0) {
    r.warnings.push_back("first segment starts at " + std::to_string(segs.front().start) + ", not 0");
  }
  for (std::size_t k = 1; k < segs.size(); ++k) {
    if (segs[k].start != segs[k - 1].end + 1) {
      r.warnings.push_back("gap between Index " + std::to_string(segs[k - 1].end) + " and Index " +
                           std::to_string(segs[k].start));
    }
  }
  r.series_len = segs.back().end + 1;
  r.segments = std::move(segs);
  return r;
}

// ---------------------------------------------------------------------------
// Prompt assembly
// ---------------------------------------------------------------------------

/// Checks the example set for an approach: none for rules-only, exactly five
/// per label otherwise.
inline void check_examples(const Approach& approach, const std::vector<ExampleAttachment>& examples) {
  if (!approach.uses_examples()) {
    if (!examples.empty()) {
      fail(ErrorCode::kWrongExampleCount, "approach " + approach.name() + " takes no examples, got " +
                                              std::to_string(examples.size()));
    }
    return;
  }
  if (examples.empty()) {
    fail(ErrorCode::kMissingExamplesForApproach, "approach " + approach.name() + " requires example recordings");
  }
  std::array<std::size_t, 5> per_label{};
  for (const auto& e : examples) ++per_label[index_of(e.label)];
  for (PrimitiveLabel l : kAllLabels) {
    if (per_label[index_of(l)] != kExamplesPerLabel) {
      fail(ErrorCode::kWrongExampleCount,
           "expected " + std::to_string(kExamplesPerLabel) + " examples of " + std::string(to_string(l)) +
               ", got " + std::to_string(per_label[index_of(l)]) + " (" + std::to_string(examples.size()) +
               " total)");
    }
  }
}

inline PromptBundle build_prompt(const Approach& approach, std::vector<ExampleAttachment> training_set,
                                 VelocitySeries query, std::vector<std::string> feedback_notes,
                                 const PromptTemplates& templates = PromptTemplates::defaults()) {
  check_examples(approach, training_set);
  if (!approach.with_feedback && !feedback_notes.empty()) {
    fail(ErrorCode::kInvalidArgument, "feedback notes given to approach " + approach.name() + " without feedback");
  }
  const std::map<std::string, std::string> values = {
      {"primitive_list", primitive_list()},
      {"example_count", std::to_string(kExamplesPerLabel * kAllLabels.size())},
      {"examples_per_label", std::to_string(kExamplesPerLabel)},
  };
  std::string system = render_template(templates.preamble, values);
  if (approach.uses_rules()) system += "\n" + render_template(templates.rules, values);
  if (approach.uses_examples()) system += "\n" + render_template(templates.examples_intro, values);
  system += "\n" + render_template(templates.segmentation, values);
  system += "\n" + render_template(templates.output_format, values);
  if (approach.with_feedback && !feedback_notes.empty()) {
    std::string notes;
    for (const auto& n : feedback_notes) notes += "- " + n + "\n";
    system += "\n" + render_template(templates.feedback, {{"notes", notes}});
  }

  PromptBundle b;
  b.approach = approach;
  b.system_text = std::move(system);
  b.example_attachments = std::move(training_set);
  b.query_series = std::move(query);
  b.feedback_notes = std::move(feedback_notes);
  return b;
}

struct ChatMessage {
  std::string role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", model}, {"messages", msgs}, {"temperature", temperature}};
  }
};

/// System message, one user message per example (inline fenced table), then
/// the query.
inline std::vector<ChatMessage> to_messages(const PromptBundle& bundle,
                                            const PromptTemplates& templates = PromptTemplates::defaults(),
                                            std::size_t max_rows = kDefaultMaxRows) {
  std::vector<ChatMessage> msgs;
  msgs.push_back({"system", bundle.system_text});
  const std::size_t n_examples = bundle.example_attachments.size();
  for (std::size_t k = 0; k < n_examples; ++k) {
    const auto& e = bundle.example_attachments[k];
    msgs.push_back({"user", render_template(templates.example,
                                            {{"example_number", std::to_string(k + 1)},
                                             {"example_count", std::to_string(n_examples)},
                                             {"label", std::string(to_string(e.label))},
                                             {"table", serialize_series(e.series, max_rows)}})});
  }
  char rate[32];
  std::snprintf(rate, sizeof rate, "%g", bundle.query_series.rate);
  msgs.push_back({"user", render_template(templates.query,
                                          {{"sample_count", std::to_string(bundle.query_series.size())},
                                           {"rate", rate},
                                           {"table", serialize_series(bundle.query_series, max_rows)}})});
  return msgs;
}

// ---------------------------------------------------------------------------
// Clients, audit log and inference
// ---------------------------------------------------------------------------

struct LlmClientConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 120.0;
  int max_retries = 3;

  void validate() const {
    if (max_retries < 0) fail(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
    if (!(timeout_s > 0.0)) fail(ErrorCode::kInvalidArgument, "timeout must be > 0");
  }
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant reply text. Throws TransportError.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Scripted client: each call consumes the next entry, either a reply or a
/// transport failure.
class MockChatClient : public ChatClient {
 public:
  struct Failure {
    std::string message = "mock transport failure";
    bool transient = true;
  };
  using Step = std::variant<std::string, Failure>;

  MockChatClient() = default;
  explicit MockChatClient(std::vector<Step> script) : script_(script.begin(), script.end()) {}

  void push_reply(std::string reply) { script_.emplace_back(std::move(reply)); }
  void push_failure(Failure f) { script_.emplace_back(std::move(f)); }
  void push_failure() { push_failure(Failure{"mock transport failure", true}); }

  std::string complete(const ChatRequest& request) override {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    if (script_.empty()) throw TransportError("mock client has no scripted reply left", false);
    Step step = std::move(script_.front());
    script_.pop_front();
    if (auto* f = std::get_if<Failure>(&step)) throw TransportError(f->message, f->transient);
    return std::get<std::string>(std::move(step));
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }
  std::vector<ChatRequest> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  mutable std::mutex mu_;
  std::deque<Step> script_;
  std::vector<ChatRequest> requests_;
};

/// 64-bit FNV-1a, hex encoded. Stable across platforms.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// One JSON object per line per chat call.
class AuditLog {
 public:
  explicit AuditLog(std::ostream& out, std::function<std::string()> clock = utc_timestamp)
      : out_(out), clock_(std::move(clock)) {}

  void record(nlohmann::json entry) {
    entry["timestamp"] = clock_();
    std::lock_guard lock(mu_);
    out_ << entry.dump() << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::function<std::string()> clock_;
  std::mutex mu_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

struct InferenceOptions {
  std::string model = "gpt-4-turbo";
  std::string sequence_id;
  RetryPolicy retry;
  AuditLog* audit = nullptr;
  PromptTemplates templates = PromptTemplates::defaults();
  std::size_t max_rows = kDefaultMaxRows;
  double temperature = 0.0;
};

struct InferenceResult {
  SegmentationResult result;
  std::string raw_reply;
  int attempts = 0;
};

/// Sends the bundle, retrying transient transport failures with exponential
/// backoff, and parses the reply. The result is exactly
/// `parse_segments(raw_reply)`.
inline InferenceResult run_inference(const PromptBundle& bundle, ChatClient& client,
                                     const InferenceOptions& options = {}) {
  if (options.retry.max_retries < 0) fail(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  ChatRequest request;
  request.model = options.model;
  request.temperature = options.temperature;
  request.messages = to_messages(bundle, options.templates, options.max_rows);
  const std::string request_hash = fnv1a_hex(request.to_json().dump());

  auto log = [&](int attempt, const std::string* reply, const std::string* error) {
    if (!options.audit) return;
    nlohmann::json e = {{"approach", bundle.approach.name()},
                        {"sequence_id", options.sequence_id},
                        {"request_hash", request_hash},
                        {"attempt", attempt}};
    e["raw_reply"] = reply ? nlohmann::json(*reply) : nlohmann::json(nullptr);
    if (error) e["error"] = *error;
    options.audit->record(std::move(e));
  };

  auto backoff = options.retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      std::string reply = client.complete(request);
      log(attempt, &reply, nullptr);
      InferenceResult out;
      out.raw_reply = std::move(reply);
      out.attempts = attempt;
      try {
        out.result = parse_segments(out.raw_reply);
      } catch (const Error& e) {
        throw ParseError(e.what(), out.raw_reply, e.code());
      }
      return out;
    } catch (const TransportError& e) {
      const std::string msg = e.what();
      log(attempt, nullptr, &msg);
      if (!e.transient() || attempt > options.retry.max_retries) throw;
      if (options.retry.sleep) options.retry.sleep(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * options.retry.multiplier));
    }
  }
}

// ---------------------------------------------------------------------------
// Feedback
// ---------------------------------------------------------------------------

struct ValidationCase {
  std::string sequence_id;
  SegmentationResult truth;
  SegmentationResult predicted;
};

inline std::string describe(const Segment& s) {
  return std::string(to_string(s.label)) + " (Index " + std::to_string(s.start) + "–" +
         std::to_string(s.end) + ")";
}

/// One corrective note per wrong, missing or extra segment, compared in
/// chronological order. Start offsets up to `boundary_tolerance` samples are
/// accepted.
inline std::vector<std::string> build_feedback_notes(const std::vector<ValidationCase>& cases,
                                                     std::size_t boundary_tolerance = 2) {
  std::vector<std::string> notes;
  for (const auto& c : cases) {
    const auto& truth = c.truth.segments;
    const auto& pred = c.predicted.segments;
    const std::string seq = "Sequence " + c.sequence_id;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const std::string where = seq + ", segment " + std::to_string(k + 1);
      if (k >= pred.size()) {
        notes.push_back(where + ": you missed " + describe(truth[k]) + ".");
        continue;
      }
      if (pred[k].label != truth[k].label) {
        notes.push_back(where + ": you answered " + describe(pred[k]) + ", but the correct primitive is " +
                        describe(truth[k]) + ".");
        continue;
      }
      const std::size_t off = pred[k].start > truth[k].start ? pred[k].start - truth[k].start
                                                             : truth[k].start - pred[k].start;
      if (off > boundary_tolerance) {
        notes.push_back(where + ": " + std::string(to_string(truth[k].label)) + " was started at Index " +
                        std::to_string(pred[k].start) + ", but it begins at Index " +
                        std::to_string(truth[k].start) + " (" + describe(truth[k]) + ").");
      }
    }
    for (std::size_t k = truth.size(); k < pred.size(); ++k) {
      notes.push_back(seq + ": you reported an extra segment " + describe(pred[k]) + "; the sequence has " +
                      std::to_string(truth.size()) + " primitives.");
    }
  }
  return notes;
}

}  // namespace motionseg::llm
