// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "commands.hpp"

using namespace motionseg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using L = PrimitiveLabel;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

UnitQuaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec4 c(n(rng), n(rng), n(rng), n(rng));
  return UnitQuaternion::from_coeffs(c.normalized());
}

void kinematics(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  double orth = 0.0, roundtrip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto q = random_quaternion(rng);
    const Mat43 j = jq_matrix(q);
    orth = std::max(orth, (j.transpose() * j - Mat3::Identity()).cwiseAbs().maxCoeff());
    const Vec3 w(n(rng), n(rng), n(rng));
    roundtrip = std::max(roundtrip, (quat_rate_to_omega(q, omega_to_quat_rate(q, w)) - w).norm());
  }
  const double dt = seconds_since(t0);
  c.require(orth < 1e-12, "max |J^T J - I| = " + std::to_string(orth));
  c.require(roundtrip < 1e-12, "roundtrip error " + std::to_string(roundtrip));
  c.require(dt < 1.0, "took " + std::to_string(dt) + " s");
}

void numerics(Check& c) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.01, 0.2);
  for (int i = 0; i < 500 && c.ok; ++i) {
    const int n = 2 + static_cast<int>(rng() % 30);
    std::vector<double> t(n), y(n);
    double tt = 0.0;
    for (int k = 0; k < n; ++k) {
      tt += pos(rng);
      t[k] = tt;
      y[k] = 10.0 * u(rng);
    }
    const double q = t.front() + (t.back() - t.front()) * (0.5 + 0.5 * u(rng));
    const double sigma = 0.02 + std::abs(u(rng)) * 0.1;
    const double est = nw_estimate(t, y, q, sigma);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    c.require(est >= *lo - 1e-12 && est <= *hi + 1e-12, "NW estimate leaves the hull");
    const double k = u(rng);
    std::vector<double> cst(n, k);
    c.require(std::abs(nw_estimate(t, cst, q, sigma) - k) < 1e-12, "NW does not reproduce a constant");
  }

  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), cc = u(rng), h = pos(rng);
    std::vector<double> y(12);
    for (int k = 0; k < 12; ++k) y[k] = a + b * (k * h) + cc * (k * h) * (k * h);
    const auto d = central_diff(y, h);
    for (int k = 0; k < 12; ++k) {
      c.require(std::abs(d[k] - (b + 2.0 * cc * k * h)) <= 1e-9, "central difference inexact on a quadratic");
    }
  }

  PoseSeries s;
  s.source_rate_hz = 20.0;
  for (int k = 0; k <= 60; ++k) {
    const double t = k / 20.0;
    s.samples.push_back({t, Vec3::Zero(), UnitQuaternion::exp(Vec3(0.5 * t, 0, 0))});
  }
  const auto v = differentiate(s);
  double err = 0.0;
  for (const auto& x : v.samples) err = std::max(err, (x.v.tail<3>() - Vec3(0.5, 0, 0)).norm());
  c.require(err < 1e-3, "omega error " + std::to_string(err));
}

struct OracleRun {
  std::size_t correct = 0, total = 0;
  std::vector<double> abs_err;
};

OracleRun oracle_suite(double noise, std::uint64_t base_seed) {
  OracleRun r;
  for (std::uint64_t i = 0; i < 100; ++i) {
    CompositeOptions opt;
    opt.noise_std = noise;
    const auto spec = random_composite_spec(base_seed + i, opt);
    const auto rec = generate_sequence(spec);
    const auto pred = segment_and_classify(rec.velocity);
    for (bool m : eval::match_primitives(rec.truth, pred)) r.correct += m;
    r.total += rec.truth.segments.size();
    for (long long e : eval::boundary_errors(rec.truth, pred)) r.abs_err.push_back(std::abs(static_cast<double>(e)));
  }
  return r;
}

void oracle(Check& c) {
  const auto t0 = Clock::now();
  const auto clean = oracle_suite(0.0, 1000);
  const auto noisy = oracle_suite(0.1, 2000);
  const double dt = seconds_since(t0);
  const double median = eval::error_summary(clean.abs_err).median;
  const double noisy_acc = static_cast<double>(noisy.correct) / static_cast<double>(noisy.total);
  c.require(clean.correct == clean.total,
            "noise-free " + std::to_string(clean.correct) + "/" + std::to_string(clean.total));
  c.require(median <= 2.0, "median |boundary error| " + std::to_string(median));
  c.require(noisy_acc >= 0.9, "noisy accuracy " + std::to_string(noisy_acc));
  c.require(dt < 10.0, "took " + std::to_string(dt) + " s");
}

void scale_invariance(Check& c) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    CompositeOptions opt;
    opt.noise_std = 0.05;
    const auto rec = generate_sequence(random_composite_spec(3000 + i, opt));
    const auto base = segment_and_classify(rec.velocity);
    for (double k : {0.1, 3.7, 100.0}) {
      const auto r = segment_and_classify(scaled(rec.velocity, k));
      c.require(r.segments == base.segments, "composite " + std::to_string(i) + " differs at c=" + std::to_string(k));
    }
  }
}

void table2_fixture(Check& c) {
  const auto report = eval::table2_report();
  const std::vector<std::string> want{"11 / 56 (19%)", "8 / 56 (14%)", "16 / 56 (28%)", "19 / 43 (44%)"};
  c.require(report.scores.size() == want.size(), "wrong number of approaches");
  for (std::size_t k = 0; k < want.size() && k < report.scores.size(); ++k) {
    c.require(report.scores[k].ratio_text() == want[k], "got " + report.scores[k].ratio_text());
  }
  std::size_t total = 0, starred = 0;
  for (const auto& row : table2::rows()) {
    total += row.cells.size();
    if (row.validation) starred += row.cells.size();
  }
  c.require(total == 56 && starred == 13, "recount " + std::to_string(total) + "/" + std::to_string(starred));
}

void parser(Check& c) {
  const auto r = llm::parse_segments("twist (Index 0–62), tilt (Index 63–112), pull (Index 113–170)");
  c.require(r.segments == std::vector<Segment>{{L::kTwist, 0, 62}, {L::kTilt, 63, 112}, {L::kPull, 113, 170}},
            "example string misparsed");

  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 5;
    std::vector<std::size_t> b;
    std::vector<L> labels;
    std::size_t at = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) b.push_back(at);
      at += 1 + rng() % 80;
      labels.push_back(kAllLabels[rng() % kAllLabels.size()]);
    }
    const auto truth = make_contiguous(b, labels, at);
    const std::string text = llm::format_segments(truth);
    const auto back = llm::parse_segments(text);
    c.require(back == truth, "parse(format(r)) != r for " + text);
    c.require(llm::format_segments(back) == text, "format(parse(s)) != s for " + text);
  }

  auto code_of = [](const std::string& text) {
    try {
      llm::parse_segments(text);
    } catch (const Error& e) {
      return std::optional<ErrorCode>(e.code());
    }
    return std::optional<ErrorCode>();
  };
  c.require(code_of("no segments here") == ErrorCode::kNoSegmentsFound, "no-segments class");
  c.require(code_of("lift (Index 0–10)") == ErrorCode::kUnknownLabel, "unknown-label class");
  c.require(code_of("pull (Index 20–10)") == ErrorCode::kMalformedRange, "malformed-range class");
  c.require(code_of("twist (Index 0–20), pull (Index 15–30)") == ErrorCode::kOverlapError, "overlap class");
}

void prompt_contracts(Check& c) {
  std::vector<llm::ExampleAttachment> examples;
  for (auto l : kAllLabels) {
    for (std::size_t n = 0; n < llm::kExamplesPerLabel; ++n) {
      examples.push_back({l, generate_primitive(l, 2.0, {}, 0.0, 50 + n, 20.0).velocity});
    }
  }
  const auto query = generate_sequence(random_composite_spec(5)).velocity;
  auto has = [](const std::string& s, std::string_view p) { return s.find(p) != std::string::npos; };

  const auto a = llm::build_prompt(llm::parse_approach("a"), {}, query, {});
  const auto b = llm::build_prompt(llm::parse_approach("b"), examples, query, {});
  const auto cc = llm::build_prompt(llm::parse_approach("c"), examples, query, {});
  c.require(a.example_attachments.empty(), "A has attachments");
  c.require(b.example_attachments.size() == 25, "B attachment count");
  c.require(cc.example_attachments.size() == 25, "C attachment count");
  for (auto phrase : llm::rule_phrases()) {
    c.require(has(a.system_text, phrase), "A lacks a rule phrase");
    c.require(!has(b.system_text, phrase), "B has a rule phrase");
    c.require(has(cc.system_text, phrase), "C lacks a rule phrase");
  }

  auto rejected = [&](const char* approach, std::vector<llm::ExampleAttachment> ex, ErrorCode want) {
    try {
      llm::build_prompt(llm::parse_approach(approach), std::move(ex), query, {});
    } catch (const Error& e) {
      return e.code() == want;
    }
    return false;
  };
  auto short_set = examples;
  short_set.pop_back();
  c.require(rejected("b", short_set, ErrorCode::kWrongExampleCount), "B accepts 24 examples");
  c.require(rejected("c", short_set, ErrorCode::kWrongExampleCount), "C accepts 24 examples");
  c.require(rejected("a", examples, ErrorCode::kWrongExampleCount), "A accepts examples");
  c.require(rejected("b", {}, ErrorCode::kMissingExamplesForApproach), "B accepts no examples");

  llm::MockChatClient mock;
  mock.push_reply(llm::format_segments(segment_and_classify(query)));
  const auto res = llm::run_inference(cc, mock);
  c.require(mock.calls() == 1 && !res.result.segments.empty(), "mock inference failed");
}

std::string slurp_tree(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + io::read_file(f);
  return all;
}

std::string pipeline(const fs::path& root) {
  using namespace motionseg::cli;
  std::ostringstream out, err;
  RunConfig cfg;  // seed 7
  GenerateOptions g;
  g.table2 = true;
  g.out_dir = root / "gen";
  g.cfg = cfg;
  if (cmd_generate(g, {out, err}) != kExitOk) throw std::runtime_error("generate failed: " + err.str());
  for (int k = 1; k <= 20; ++k) {
    char id[8];
    std::snprintf(id, sizeof id, "seq%02d", k);
    PreprocessOptions p;
    p.in = root / "gen" / (std::string(id) + ".csv");
    p.out = root / "vel" / (std::string(id) + ".csv");
    p.truth_out = root / "button" / (std::string(id) + ".truth.json");
    p.cfg = cfg;
    if (cmd_preprocess(p, {out, err}) != kExitOk) throw std::runtime_error("preprocess failed: " + err.str());
    SegmentOptions s;
    s.in = p.out;
    s.out = root / "pred" / (std::string(id) + ".json");
    s.cfg = cfg;
    cmd_segment(s, {out, err});
  }
  EvalOptions e;
  e.truth_dir = root / "gen";
  e.preds = {"oracle=" + (root / "pred").string()};
  e.out = root / "report.json";
  e.offsets_csv = root / "offsets.csv";
  e.cfg = cfg;
  if (cmd_eval(e, {out, err}) == kExitError) throw std::runtime_error("eval failed");
  return out.str();
}

void determinism(Check& c) {
  std::string tmpl = (fs::temp_directory_path() / "motionseg_accept_XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) {
    c.require(false, "cannot create a scratch directory");
    return;
  }
  const fs::path root = tmpl;
  try {
    const std::string log1 = pipeline(root / "run1");
    const std::string log2 = pipeline(root / "run2");
    const std::string a = slurp_tree(root / "run1");
    const std::string b = slurp_tree(root / "run2");
    c.require(!a.empty() && a == b, "outputs differ between runs");
    std::string l2 = log2;
    for (std::size_t pos; (pos = l2.find("run2")) != std::string::npos;) l2.replace(pos, 4, "run1");
    c.require(log1 == l2, "console output differs between runs");
  } catch (const std::exception& e) {
    c.require(false, e.what());
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"kinematics identities", kinematics},
      {"numerical methods", numerics},
      {"oracle segmentation", oracle},
      {"scale invariance", scale_invariance},
      {"table 2 fixture", table2_fixture},
      {"parser", parser},
      {"prompt contracts", prompt_contracts},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name;
    if (!c.ok) std::cout << ": " << c.why.str();
    std::cout << std::endl;
    failed += !c.ok;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
