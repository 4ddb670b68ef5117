#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace motionseg;
using namespace motionseg::cli;

// Layered configuration: defaults, then --config, then --set, then dedicated flags.
struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "Run configuration file (key = value)")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "Override one config key, KEY=VALUE (repeatable)");
  }

  RunConfig resolve(const std::function<void(RunConfig&)>& flags = {}) const {
    RunConfig cfg = file.empty() ? RunConfig{} : RunConfig::load(file);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorCode::kInvalidArgument, "--set expects KEY=VALUE, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (flags) flags(cfg);
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation of fruit-picking demonstrations into primitive actions"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Recording CSV -> velocity CSV on the output grid");
  ConfigArgs pre_cfg;
  PreprocessOptions pre_o;
  std::optional<double> pre_sigma, pre_rate;
  pre_cfg.attach(pre);
  pre->add_option("--in", pre_o.in, "Recording CSV")->required()->check(CLI::ExistingFile);
  pre->add_option("--out", pre_o.out, "Velocity CSV to write")->required();
  pre->add_option("--truth-out", pre_o.truth_out, "Truth JSON from button presses");
  pre->add_option("--emit-plot-data", pre_o.plot_out, "Write sup-normalized series as CSV");
  pre->add_option("--sigma", pre_sigma, "Kernel bandwidth, s");
  pre->add_option("--rate", pre_rate, "Output rate, Hz");
  pre->callback([&] {
    exit_code = guarded([&] {
      pre_o.cfg = pre_cfg.resolve([&](RunConfig& c) {
        if (pre_sigma) c.sigma = *pre_sigma;
        if (pre_rate) c.output_rate = *pre_rate;
      });
      return cmd_preprocess(pre_o);
    });
  });

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize labeled recordings");
  ConfigArgs gen_cfg;
  GenerateOptions gen_o;
  gen_cfg.attach(gen);
  gen->add_option("--seq", gen_o.sequence, "Comma-separated labels, e.g. twist,tilt,pull");
  gen->add_option("--id", gen_o.id, "Recording id for --seq")->capture_default_str();
  gen->add_option("--dur", gen_o.durations, "Segment duration(s), s")->delimiter(',')->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed, "Random seed (overrides config)");
  gen->add_option("--noise", gen_o.noise, "Velocity noise, fraction of amplitude")->capture_default_str();
  gen->add_option("--rate", gen_o.rate, "Recording rate, Hz")->capture_default_str();
  gen->add_option("--grid-rate", gen_o.grid_rate, "Truth grid rate, Hz")->capture_default_str();
  gen->add_option("--out-dir", gen_o.out_dir, "Output directory")->capture_default_str();
  gen->add_flag("--table2", gen_o.table2, "Generate the 20 fixture label sequences");
  gen->add_flag("--training-set", gen_o.training_set, "Generate 5 single-primitive examples per label");
  gen->callback([&] {
    exit_code = guarded([&] {
      gen_o.cfg = gen_cfg.resolve();
      return cmd_generate(gen_o);
    });
  });

  // segment
  auto* seg = app.add_subcommand("segment", "Rule-based segmentation of a velocity series");
  ConfigArgs seg_cfg;
  SegmentOptions seg_o;
  bool seg_grammar = false;
  seg_cfg.attach(seg);
  seg->add_option("--in", seg_o.in, "Velocity or recording CSV")->required()->check(CLI::ExistingFile);
  seg->add_option("--out", seg_o.out, "Segmentation JSON to write");
  seg->add_flag("--grammar", seg_grammar, "Force the final label into {pull, slide}");
  seg->callback([&] {
    exit_code = guarded([&] {
      seg_o.cfg = seg_cfg.resolve([&](RunConfig& c) {
        if (seg_grammar) c.grammar = true;
      });
      return cmd_segment(seg_o);
    });
  });

  // llm
  auto* llm_cmd = app.add_subcommand("llm", "Segment with a chat-completion model");
  ConfigArgs llm_cfg;
  LlmOptions llm_o;
  std::optional<std::size_t> llm_conc;
  llm_cfg.attach(llm_cmd);
  llm_cmd->add_option("--in", llm_o.inputs, "Velocity or recording CSV (repeatable)")->required()->check(CLI::ExistingFile);
  llm_cmd->add_option("--approach", llm_o.approach, "a (rules), b (examples), c (both), feedback")->capture_default_str();
  llm_cmd->add_option("--examples-dir", llm_o.examples_dir, "Directory of <label>_<n>.csv examples");
  llm_cmd->add_option("--feedback", llm_o.feedback_file, "JSON array of corrective notes")->check(CLI::ExistingFile);
  llm_cmd->add_option("--mock", llm_o.mock_file, "Scripted replies JSON; no network")->check(CLI::ExistingFile);
  llm_cmd->add_option("--out-dir", llm_o.out_dir, "Directory for <id>.json results")->capture_default_str();
  llm_cmd->add_option("--audit-log", llm_o.audit_log, "JSONL audit log (appended)");
  llm_cmd->add_option("--templates", llm_o.templates_dir, "Prompt template directory")->check(CLI::ExistingDirectory);
  llm_cmd->add_option("--dump-requests", llm_o.dump_requests, "Write each request as <id>.request.json");
  llm_cmd->add_option("--concurrency", llm_conc, "Concurrent requests");
  llm_cmd->callback([&] {
    exit_code = guarded([&] {
      llm_o.cfg = llm_cfg.resolve([&](RunConfig& c) {
        if (llm_conc) c.llm_concurrency = *llm_conc;
      });
      return cmd_llm(llm_o);
    });
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against truth");
  ConfigArgs ev_cfg;
  EvalOptions ev_o;
  ev_cfg.attach(ev);
  ev->add_option("--truth-dir", ev_o.truth_dir, "Directory of <id>.truth.json");
  ev->add_option("--pred", ev_o.preds, "Predictions, NAME=DIR or DIR (repeatable)");
  ev->add_option("--validation", ev_o.validation, "Validation sequence ids")->delimiter(',');
  ev->add_option("--exclude-validation", ev_o.exclude_validation, "Run names scored without validation sequences");
  ev->add_flag("--table2-fixture", ev_o.table2_fixture, "Score the built-in 20-sequence fixture");
  ev->add_option("--out", ev_o.out, "Report JSON");
  ev->add_option("--table", ev_o.table, "Text table");
  ev->add_option("--offsets-csv", ev_o.offsets_csv, "Per-primitive boundary offsets CSV");
  ev->add_option("--feedback-notes", ev_o.feedback_notes, "Write corrective notes for validation sequences");
  ev->callback([&] {
    exit_code = guarded([&] {
      ev_o.cfg = ev_cfg.resolve();
      if (!ev_o.table2_fixture && ev_o.truth_dir.empty()) {
        fail(ErrorCode::kInvalidArgument, "--truth-dir is required unless --table2-fixture is given");
      }
      return cmd_eval(ev_o);
    });
  });

  // config
  auto* cfg_cmd = app.add_subcommand("config", "Print the effective configuration");
  ConfigArgs cfg_args;
  cfg_args.attach(cfg_cmd);
  cfg_cmd->callback([&] {
    exit_code = guarded([&] {
      std::cout << cfg_args.resolve().to_text();
      return kExitOk;
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }
  return exit_code;
}
