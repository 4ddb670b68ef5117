// Subcommand implementations for the motionseg tool. Each command takes an
// options struct plus output streams and returns the process exit code:
// 0 success, 1 degraded (warnings emitted), 2 usage or input error.
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "motionseg/motionseg.hpp"
#include "motionseg/http_chat_client.hpp"

namespace motionseg::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitDegraded = 1, kExitError = 2 };

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline std::string pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Pose series in {F}: the file's fruit pose when present, else the first sample.
inline PoseSeries to_fruit_frame(const io::Recording& rec) {
  const PoseSample frame = rec.fruit_pose ? *rec.fruit_pose : rec.pose.samples.front();
  PoseSeries out = express_in_frame(rec.pose, frame);
  out.recording_id = rec.pose.recording_id;
  return out;
}

inline VelocitySeries preprocess_recording(const io::Recording& rec, const RunConfig& cfg) {
  VelocitySeries v = differentiate(resample_pose(to_fruit_frame(rec), cfg.kernel()));
  v.recording_id = rec.pose.recording_id;
  return v;
}

/// Velocity CSV as-is, or a recording CSV run through preprocessing.
inline VelocitySeries load_series(const fs::path& path, const RunConfig& cfg) {
  if (io::looks_like_recording(path)) return preprocess_recording(io::read_recording(path, cfg.renorm_tolerance), cfg);
  return io::read_velocity(path);
}

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

struct PreprocessOptions {
  fs::path in;
  fs::path out;
  fs::path truth_out;  // empty: "<out stem>.truth.json" next to out when a button column exists
  fs::path plot_out;   // empty: no plot data
  RunConfig cfg;
};

inline int cmd_preprocess(const PreprocessOptions& o, Streams s = {}) {
  const auto rec = io::read_recording(o.in, o.cfg.renorm_tolerance);
  const VelocitySeries vel = preprocess_recording(rec, o.cfg);
  io::write_file(o.out, io::format_velocity(vel));
  int code = kExitOk;

  std::optional<VelocitySeries> normalized;
  try {
    normalized = sup_normalize(vel, o.cfg.sup_threshold);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateInput) throw;
    s.err << "warning: " << e.what() << "\n";
    code = kExitDegraded;
  }
  if (!o.plot_out.empty()) {
    io::write_file(o.plot_out, io::format_velocity(normalized ? *normalized : vel));
  }

  if (rec.button) {
    std::vector<std::size_t> boundaries;
    for (double t : io::button_transitions(rec)) {
      const std::size_t idx = io::nearest_grid_index(t, vel.rate);
      if (idx == 0 || idx >= vel.size() || (!boundaries.empty() && idx <= boundaries.back())) {
        s.err << "warning: button transition at t=" << t << " s does not give a new boundary; dropped\n";
        code = kExitDegraded;
        continue;
      }
      boundaries.push_back(idx);
    }
    const nlohmann::json truth = {{"recording_id", vel.recording_id},
                                  {"rate", vel.rate},
                                  {"series_len", vel.size()},
                                  {"boundaries", boundaries}};
    fs::path truth_path = o.truth_out;
    if (truth_path.empty()) truth_path = o.out.parent_path() / (io::stem_id(o.out) + ".truth.json");
    io::write_file(truth_path, pretty(truth));
  }
  s.out << "wrote " << vel.size() << " samples at " << vel.rate << " Hz to " << o.out.string() << "\n";
  return code;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOptions {
  std::string sequence;  // comma-separated labels
  std::string id = "generated";
  std::vector<double> durations{3.0};
  double noise = 0.0;
  double rate = 500.0;       // recording rate
  double grid_rate = 20.0;   // truth grid
  bool table2 = false;
  bool training_set = false;  // 5 single-primitive velocity files per label
  fs::path out_dir = ".";
  RunConfig cfg;  // seed and amplitudes
};

inline std::vector<PrimitiveLabel> parse_label_list(const std::string& text) {
  std::vector<PrimitiveLabel> labels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) labels.push_back(parse_label(io::detail::trim(item)));
  if (labels.empty()) fail(ErrorCode::kInvalidArgument, "empty label sequence");
  return labels;
}

/// Writes `<id>.csv` (pose with a button column pressed at each boundary) and
/// `<id>.truth.json` on the grid that preprocessing produces.
inline void write_generated(const LabeledRecording& rec, double grid_rate, const fs::path& dir) {
  const std::string& id = rec.pose.recording_id;
  std::vector<int> button(rec.pose.size(), 0);
  for (std::size_t b : rec.truth.boundaries()) button[b] = 1;
  io::write_file(dir / (id + ".csv"), io::format_recording(rec.pose, &button));

  const std::size_t grid_len = grid_size(rec.pose.duration(), grid_rate);
  const auto truth = regrid(rec.truth, rec.pose.source_rate_hz, grid_rate, grid_len);
  io::write_file(dir / (id + ".truth.json"), pretty(io::segmentation_to_json(truth, id, grid_rate)));
}

inline int cmd_generate(const GenerateOptions& o, Streams s = {}) {
  int code = kExitOk;
  std::vector<MotionSpec> specs;
  if (o.table2) {
    if (o.durations.size() != 1) fail(ErrorCode::kInvalidArgument, "--table2 takes a single duration");
    specs = table2_specs(o.durations[0], o.noise, o.cfg.seed, o.rate);
  } else if (!o.sequence.empty()) {
    MotionSpec spec;
    spec.labels = parse_label_list(o.sequence);
    spec.durations = o.durations;
    spec.noise_std = o.noise;
    spec.seed = o.cfg.seed;
    spec.rate = o.rate;
    spec.recording_id = o.id;
    specs.push_back(std::move(spec));
  } else if (!o.training_set) {
    fail(ErrorCode::kInvalidArgument, "nothing to generate: give --seq, --table2 or --training-set");
  }

  for (auto& spec : specs) {
    spec.amplitude = o.cfg.amplitudes();
    const auto rec = generate_sequence(spec);
    for (const auto& w : rec.warnings) {
      s.err << "warning: " << spec.recording_id << ": " << w << "\n";
      code = kExitDegraded;
    }
    write_generated(rec, o.grid_rate, o.out_dir);
    s.out << "wrote " << spec.recording_id << " (" << rec.truth.segments.size() << " segments)\n";
  }

  if (o.training_set) {
    RunConfig pcfg = o.cfg;
    pcfg.output_rate = o.grid_rate;
    const double dur = o.durations.front();
    for (PrimitiveLabel l : kAllLabels) {
      for (std::size_t n = 1; n <= llm::kExamplesPerLabel; ++n) {
        const std::uint64_t seed = o.cfg.seed * 1000 + index_of(l) * 10 + n;
        const auto rec = generate_primitive(l, dur, o.cfg.amplitudes(), o.noise, seed, o.rate);
        io::Recording r;
        r.pose = rec.pose;
        const std::string name = std::string(to_string(l)) + "_" + std::to_string(n);
        r.pose.recording_id = name;
        io::write_file(o.out_dir / (name + ".csv"), io::format_velocity(preprocess_recording(r, pcfg)));
      }
    }
    s.out << "wrote " << kAllLabels.size() * llm::kExamplesPerLabel << " training examples\n";
  }
  return code;
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentOptions {
  fs::path in;
  fs::path out;  // empty: stdout only
  RunConfig cfg;
};

inline int cmd_segment(const SegmentOptions& o, Streams s = {}) {
  const VelocitySeries v = load_series(o.in, o.cfg);
  const auto templates = o.cfg.templates();
  const auto result = segment_and_classify(v, o.cfg.segmenter(), templates);
  if (!o.out.empty()) {
    io::write_file(o.out, pretty(io::segmentation_to_json(result, io::stem_id(o.in), v.rate)));
  }
  s.out << llm::format_segments(result) << "\n";
  for (const auto& w : result.warnings) s.err << "warning: " << w << "\n";
  return result.warnings.empty() ? kExitOk : kExitDegraded;
}

// ---------------------------------------------------------------------------
// llm
// ---------------------------------------------------------------------------

using ClientFactory = std::function<std::unique_ptr<llm::ChatClient>(const std::string& sequence_id)>;

struct LlmOptions {
  std::vector<fs::path> inputs;
  std::string approach = "a";
  fs::path examples_dir;
  fs::path feedback_file;  // JSON array of notes, or {"notes": [...]}
  fs::path mock_file;      // scripted replies; no network when set
  fs::path out_dir = ".";
  fs::path audit_log;       // JSONL, appended
  fs::path templates_dir;   // prompt template overrides
  fs::path dump_requests;   // directory for `<id>.request.json`
  std::function<std::string()> clock;  // audit timestamps; default UTC now
  ClientFactory client_factory;        // overrides mock/http selection
  RunConfig cfg;
};

/// Examples named `<label>_<n>.csv`, sorted by file name.
inline std::vector<llm::ExampleAttachment> load_examples(const fs::path& dir, const RunConfig& cfg) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIoError, "examples directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<llm::ExampleAttachment> out;
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    const auto us = stem.rfind('_');
    const auto label = try_parse_label(stem.substr(0, us));
    if (us == std::string::npos || !label) continue;
    out.push_back({*label, load_series(f, cfg)});
  }
  return out;
}

inline std::vector<std::string> load_notes(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
    if (j.is_object()) j = j.at("notes");
    return j.get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string(), 0, std::string("expected a JSON array of notes: ") + e.what());
  }
}

/// Mock replies: an object keyed by sequence id or an array in input order.
/// Each entry is a reply string, or an array of steps where a step is a reply
/// string or {"error": "...", "transient": bool}.
inline std::vector<llm::MockChatClient::Step> mock_script(const nlohmann::json& entry) {
  std::vector<llm::MockChatClient::Step> steps;
  auto step = [&](const nlohmann::json& e) {
    if (e.is_string()) {
      steps.emplace_back(e.get<std::string>());
    } else {
      steps.emplace_back(llm::MockChatClient::Failure{e.at("error").get<std::string>(), e.value("transient", true)});
    }
  };
  if (entry.is_array()) {
    for (const auto& e : entry) step(e);
  } else {
    step(entry);
  }
  return steps;
}

inline ClientFactory mock_factory(const fs::path& path, const std::vector<std::string>& ids) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  auto table = std::make_shared<std::map<std::string, nlohmann::json>>();
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size() && k < ids.size(); ++k) (*table)[ids[k]] = j[k];
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) (*table)[it.key()] = it.value();
  } else {
    throw FormatError(path.string(), 0, "mock replies must be a JSON object or array");
  }
  return [table](const std::string& id) {
    auto client = std::make_unique<llm::MockChatClient>();
    const auto it = table->find(id);
    if (it != table->end()) {
      try {
        for (auto& st : mock_script(it->second)) {
          if (auto* r = std::get_if<std::string>(&st)) client->push_reply(*r);
          else client->push_failure(std::get<llm::MockChatClient::Failure>(st));
        }
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::kFormatError, "mock reply for " + id + ": " + e.what());
      }
    }
    return std::unique_ptr<llm::ChatClient>(std::move(client));
  };
}

inline int cmd_llm(const LlmOptions& o, Streams s = {}) {
  if (o.inputs.empty()) fail(ErrorCode::kInvalidArgument, "no input recordings");
  llm::Approach approach = llm::parse_approach(o.approach);
  std::vector<std::string> notes;
  if (!o.feedback_file.empty()) {
    notes = load_notes(o.feedback_file);
    approach.with_feedback = true;
  }
  std::vector<llm::ExampleAttachment> examples;
  if (!o.examples_dir.empty()) examples = load_examples(o.examples_dir, o.cfg);
  llm::check_examples(approach, examples);
  const auto templates = o.templates_dir.empty() ? llm::PromptTemplates::defaults()
                                                 : llm::PromptTemplates::load(o.templates_dir);

  std::vector<std::string> ids;
  std::vector<VelocitySeries> queries;
  for (const auto& p : o.inputs) {
    queries.push_back(load_series(p, o.cfg));
    ids.push_back(io::stem_id(p));
  }

  ClientFactory factory = o.client_factory;
  if (!factory && !o.mock_file.empty()) factory = mock_factory(o.mock_file, ids);
  if (!factory) {
    const auto cc = o.cfg.llm_client();
    factory = [cc](const std::string&) { return std::make_unique<llm::HttpChatClient>(cc); };
  }

  struct Outcome {
    std::optional<llm::InferenceResult> result;
    std::string error;
    std::string audit;
    nlohmann::json request;
  };
  std::vector<Outcome> outcomes(queries.size());

  auto run_one = [&](std::size_t k) {
    Outcome& oc = outcomes[k];
    std::ostringstream audit_buf;
    llm::AuditLog audit(audit_buf, o.clock ? o.clock : llm::utc_timestamp);
    try {
      const auto bundle = llm::build_prompt(approach, examples, queries[k], notes, templates);
      llm::InferenceOptions opt;
      opt.model = o.cfg.llm_model;
      opt.sequence_id = ids[k];
      opt.retry.max_retries = o.cfg.llm_max_retries;
      opt.retry.initial_backoff = std::chrono::milliseconds(o.cfg.llm_backoff_ms);
      opt.audit = &audit;
      opt.templates = templates;
      opt.max_rows = o.cfg.llm_max_rows;
      opt.temperature = o.cfg.llm_temperature;
      if (!o.dump_requests.empty()) {
        llm::ChatRequest req{opt.model, llm::to_messages(bundle, templates, opt.max_rows), opt.temperature};
        oc.request = req.to_json();
        oc.request["example_count"] = bundle.example_attachments.size();
      }
      auto client = factory(ids[k]);
      oc.result = llm::run_inference(bundle, *client, opt);
    } catch (const std::exception& e) {
      oc.error = e.what();
    }
    oc.audit = audit_buf.str();
  };

  const std::size_t workers = std::min(o.cfg.llm_concurrency, queries.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < queries.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < queries.size(); k = next++) run_one(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Everything below runs in input order, so outputs do not depend on concurrency.
  std::string audit_text;
  int code = kExitOk;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& oc = outcomes[k];
    audit_text += oc.audit;
    if (!o.dump_requests.empty() && !oc.request.is_null()) {
      io::write_file(o.dump_requests / (ids[k] + ".request.json"), pretty(oc.request));
    }
    if (!oc.result) {
      s.err << "error: " << ids[k] << ": " << oc.error << "\n";
      code = kExitDegraded;
      continue;
    }
    auto j = io::segmentation_to_json(oc.result->result, ids[k], queries[k].rate);
    j["approach"] = approach.name();
    j["raw_reply"] = oc.result->raw_reply;
    if (!oc.result->result.is_contiguous()) {
      s.err << "warning: " << ids[k] << ": reply leaves gaps between segments\n";
      code = kExitDegraded;
    }
    if (oc.result->result.series_len != queries[k].size()) {
      s.err << "warning: " << ids[k] << ": reply covers " << oc.result->result.series_len << " of "
            << queries[k].size() << " samples\n";
      code = kExitDegraded;
    }
    io::write_file(o.out_dir / (ids[k] + ".json"), pretty(j));
    s.out << ids[k] << ": " << llm::format_segments(oc.result->result) << "\n";
  }
  if (!o.audit_log.empty() && !audit_text.empty()) {
    if (o.audit_log.has_parent_path()) fs::create_directories(o.audit_log.parent_path());
    std::ofstream log(o.audit_log, std::ios::app | std::ios::binary);
    if (!log) fail(ErrorCode::kIoError, "cannot open audit log " + o.audit_log.string());
    log << audit_text;
  }
  return code;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  fs::path truth_dir;
  std::vector<std::string> preds;  // "NAME=DIR" or "DIR" (name = directory name)
  std::vector<std::string> validation;        // validation sequence ids
  std::vector<std::string> exclude_validation;  // run names scored without validation sequences
  bool table2_fixture = false;
  fs::path out;           // report JSON
  fs::path table;         // text table
  fs::path offsets_csv;
  fs::path feedback_notes;  // notes from the validation sequences of the first run
  RunConfig cfg;
};

/// Loads `<id>.truth.json` (truth) or `<id>.json` (predictions). Truth files
/// holding only boundaries, as written by preprocess, carry no labels and are
/// skipped with a warning.
inline std::map<std::string, io::LoadedSegmentation> load_dir(const fs::path& dir, bool truth,
                                                              std::ostream* warn = nullptr) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIoError, "directory not found: " + dir.string());
  std::map<std::string, io::LoadedSegmentation> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool is_truth = name.size() > 11 && name.compare(name.size() - 11, 11, ".truth.json") == 0;
    const bool is_json = entry.path().extension() == ".json";
    const bool is_request = name.find(".request.json") != std::string::npos;
    if (!entry.is_regular_file() || !is_json || is_request || is_truth != truth) continue;
    if (truth) {
      const auto j = nlohmann::json::parse(io::read_file(entry.path()), nullptr, false);
      if (j.is_object() && !j.contains("segments")) {
        if (warn) *warn << "warning: " << entry.path().string() << " has no labeled segments; skipped\n";
        continue;
      }
    }
    auto loaded = io::read_segmentation(entry.path());
    out[io::stem_id(entry.path())] = std::move(loaded);
  }
  return out;
}

inline int cmd_eval(const EvalOptions& o, Streams s = {}) {
  int code = kExitOk;
  eval::EvalReport report;
  if (o.table2_fixture) {
    report = eval::table2_report();
  } else {
    if (o.preds.empty()) fail(ErrorCode::kInvalidArgument, "no prediction directories given");
    std::ostringstream skipped;
    const auto truths = load_dir(o.truth_dir, true, &skipped);
    if (!skipped.str().empty()) {
      s.err << skipped.str();
      code = kExitDegraded;
    }
    if (truths.empty()) fail(ErrorCode::kEmptyEvalSet, "no truth files in " + o.truth_dir.string());
    std::vector<eval::ApproachEvals> runs;
    for (const auto& spec : o.preds) {
      const auto eq = spec.find('=');
      const fs::path dir = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
      std::string name = eq == std::string::npos ? dir.filename().string() : spec.substr(0, eq);
      if (name.empty()) name = dir.string();
      const auto preds = load_dir(dir, false);
      if (preds.empty()) fail(ErrorCode::kEmptyEvalSet, "no predictions in " + dir.string());
      eval::ApproachEvals run;
      run.approach = name;
      if (std::find(o.exclude_validation.begin(), o.exclude_validation.end(), name) != o.exclude_validation.end()) {
        run.policy = eval::DenominatorPolicy::kExcludeValidation;
      }
      for (const auto& [id, t] : truths) {
        const bool validation = std::find(o.validation.begin(), o.validation.end(), id) != o.validation.end();
        SegmentationResult pred;
        const auto it = preds.find(id);
        if (it == preds.end()) {
          s.err << "warning: " << name << ": no prediction for " << id << "; scored as all wrong\n";
          code = kExitDegraded;
          pred.series_len = t.result.series_len;
        } else {
          pred = it->second.result;
        }
        run.sequences.push_back(eval::evaluate_sequence(id, t.result, pred, t.rate, validation));
      }
      runs.push_back(std::move(run));
    }
    report = eval::build_report(std::move(runs));
  }

  const std::string table = eval::format_table(report);
  s.out << table;
  if (!o.table.empty()) io::write_file(o.table, table);
  if (!o.out.empty()) io::write_file(o.out, pretty(eval::to_json(report)));
  if (!o.offsets_csv.empty()) io::write_file(o.offsets_csv, eval::format_offsets_csv(report));
  if (!o.feedback_notes.empty()) {
    std::vector<llm::ValidationCase> cases;
    for (const auto& e : report.runs.front().sequences) {
      if (e.validation) cases.push_back({e.sequence_id, e.truth, e.predicted});
    }
    const auto notes = llm::build_feedback_notes(cases, o.cfg.feedback_tolerance);
    io::write_file(o.feedback_notes, pretty(nlohmann::json(notes)));
  }
  return code;
}

/// Runs a command, mapping library errors to exit code 2 with a diagnostic.
inline int guarded(const std::function<int()>& fn, std::ostream& err = std::cerr) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace motionseg::cli
