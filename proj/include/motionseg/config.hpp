// Run configuration: a flat `key = value` text file. Lines starting with '#'
// are comments. Unknown keys and out-of-range values are rejected.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "motionseg/error.hpp"
#include "motionseg/io.hpp"
#include "motionseg/llm_harness.hpp"
#include "motionseg/resample.hpp"
#include "motionseg/segmenter.hpp"
#include "motionseg/synthgen.hpp"

namespace motionseg {

struct RunConfig {
  // preprocessing
  double renorm_tolerance = 1e-3;
  double sigma = 0.05;
  double output_rate = 20.0;
  double sup_threshold = kSupNormalizeThreshold;
  // segmentation
  double theta = 0.25;
  std::size_t window = 5;
  std::size_t min_segment_len = 10;
  double lambda = 0.5;
  double quiet_ratio = 0.5;
  std::size_t persistence = 3;
  double tilt_vz_weight = kTiltVzWeight;
  bool grammar = false;
  // synthetic data
  double amp_translational = 0.1;
  double amp_angular = 0.5;
  std::uint64_t seed = 7;
  // llm
  std::string llm_endpoint = "https://api.openai.com/v1/chat/completions";
  std::string llm_model = "gpt-4-turbo";
  std::string llm_api_key_env = "OPENAI_API_KEY";
  double llm_timeout = 120.0;
  int llm_max_retries = 3;
  int llm_backoff_ms = 500;
  double llm_temperature = 0.0;
  std::size_t llm_max_rows = llm::kDefaultMaxRows;
  std::size_t llm_concurrency = 1;
  std::size_t feedback_tolerance = 2;

  KernelConfig kernel() const { return {sigma, output_rate}; }

  SegmenterParams segmenter() const {
    SegmenterParams p;
    p.theta = theta;
    p.window = window;
    p.min_segment_len = min_segment_len;
    p.lambda = lambda;
    p.quiet_ratio = quiet_ratio;
    p.persistence = persistence;
    p.grammar = grammar;
    p.sup_threshold = sup_threshold;
    return p;
  }

  std::vector<PrimitiveTemplate> templates() const { return default_templates(tilt_vz_weight); }

  Amplitudes amplitudes() const { return {amp_translational, amp_angular}; }

  llm::LlmClientConfig llm_client() const {
    return {llm_endpoint, llm_model, llm_api_key_env, llm_timeout, llm_max_retries};
  }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) fail(ErrorCode::kInvalidArgument, std::string("config: ") + what);
    };
    require(renorm_tolerance > 0.0 && renorm_tolerance <= 0.1, "renorm_tolerance must be in (0, 0.1]");
    kernel().validate();
    segmenter().validate();
    require(tilt_vz_weight >= 0.0 && tilt_vz_weight <= 1.0, "tilt_vz_weight must be in [0, 1]");
    require(amp_translational > 0.0 && amp_angular > 0.0, "amplitudes must be > 0");
    llm_client().validate();
    require(llm_backoff_ms >= 0, "llm_backoff_ms must be >= 0");
    require(llm_temperature >= 0.0 && llm_temperature <= 2.0, "llm_temperature must be in [0, 2]");
    require(llm_max_rows >= 1, "llm_max_rows must be >= 1");
    require(llm_concurrency >= 1, "llm_concurrency must be >= 1");
  }

  /// Sets one key from its text form. Throws InvalidArgument on an unknown
  /// key or unparsable value; ranges are checked by `validate`.
  void set(const std::string& key, const std::string& value) {
    const auto& fields = field_table();
    const auto it = fields.find(key);
    if (it == fields.end()) fail(ErrorCode::kInvalidArgument, "config: unknown key '" + key + "'");
    try {
      it->second.set(*this, value);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "config: bad value '" + value + "' for " + key);
    }
  }

  std::string to_text() const {
    std::string out = "# motionseg run configuration\n";
    for (const auto& name : key_order()) out += name + " = " + field_table().at(name).get(*this) + "\n";
    return out;
  }

  static RunConfig from_text(const std::string& text, const std::string& source = "<config>") {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = io::detail::trim(line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError(source, line_no, "expected key = value");
      try {
        cfg.set(io::detail::trim(line.substr(0, eq)), io::detail::trim(line.substr(eq + 1)));
      } catch (const Error& e) {
        throw FormatError(source, line_no, e.what());
      }
    }
    cfg.validate();
    return cfg;
  }

  static RunConfig load(const std::filesystem::path& path) {
    return from_text(io::read_file(path), path.string());
  }

  static const std::vector<std::string>& key_order() {
    static const std::vector<std::string> order = {
        "renorm_tolerance", "sigma", "output_rate", "sup_threshold", "theta", "window", "min_segment_len",
        "lambda", "quiet_ratio", "persistence", "tilt_vz_weight", "grammar", "amp_translational",
        "amp_angular", "seed", "llm_endpoint", "llm_model", "llm_api_key_env", "llm_timeout",
        "llm_max_retries", "llm_backoff_ms", "llm_temperature", "llm_max_rows", "llm_concurrency",
        "feedback_tolerance"};
    return order;
  }

 private:
  struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
  };

  // Shortest text that reads back to the same double.
  static std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  }

  template <typename T>
  static T parse_whole(const std::string& v) {
    std::size_t used = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<T>(x);
  }

  static double parse_double(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  }

  static bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument(v);
  }

  static const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> t = [] {
      std::map<std::string, Field> m;
      auto dbl = [&](const char* k, double RunConfig::*f) {
        m[k] = {[f](RunConfig& c, const std::string& v) { c.*f = parse_double(v); },
                [f](const RunConfig& c) { return num(c.*f); }};
      };
      auto size = [&](const char* k, std::size_t RunConfig::*f) {
        m[k] = {[f](RunConfig& c, const std::string& v) { c.*f = parse_whole<std::size_t>(v); },
                [f](const RunConfig& c) { return std::to_string(c.*f); }};
      };
      auto integer = [&](const char* k, int RunConfig::*f) {
        m[k] = {[f](RunConfig& c, const std::string& v) {
                  std::size_t used = 0;
                  c.*f = std::stoi(v, &used);
                  if (used != v.size()) throw std::invalid_argument(v);
                },
                [f](const RunConfig& c) { return std::to_string(c.*f); }};
      };
      auto str = [&](const char* k, std::string RunConfig::*f) {
        m[k] = {[f](RunConfig& c, const std::string& v) { c.*f = v; }, [f](const RunConfig& c) { return c.*f; }};
      };
      dbl("renorm_tolerance", &RunConfig::renorm_tolerance);
      dbl("sigma", &RunConfig::sigma);
      dbl("output_rate", &RunConfig::output_rate);
      dbl("sup_threshold", &RunConfig::sup_threshold);
      dbl("theta", &RunConfig::theta);
      size("window", &RunConfig::window);
      size("min_segment_len", &RunConfig::min_segment_len);
      dbl("lambda", &RunConfig::lambda);
      dbl("quiet_ratio", &RunConfig::quiet_ratio);
      size("persistence", &RunConfig::persistence);
      dbl("tilt_vz_weight", &RunConfig::tilt_vz_weight);
      m["grammar"] = {[](RunConfig& c, const std::string& v) { c.grammar = parse_bool(v); },
                      [](const RunConfig& c) { return std::string(c.grammar ? "true" : "false"); }};
      dbl("amp_translational", &RunConfig::amp_translational);
      dbl("amp_angular", &RunConfig::amp_angular);
      m["seed"] = {[](RunConfig& c, const std::string& v) { c.seed = parse_whole<std::uint64_t>(v); },
                   [](const RunConfig& c) { return std::to_string(c.seed); }};
      str("llm_endpoint", &RunConfig::llm_endpoint);
      str("llm_model", &RunConfig::llm_model);
      str("llm_api_key_env", &RunConfig::llm_api_key_env);
      dbl("llm_timeout", &RunConfig::llm_timeout);
      integer("llm_max_retries", &RunConfig::llm_max_retries);
      integer("llm_backoff_ms", &RunConfig::llm_backoff_ms);
      dbl("llm_temperature", &RunConfig::llm_temperature);
      size("llm_max_rows", &RunConfig::llm_max_rows);
      size("llm_concurrency", &RunConfig::llm_concurrency);
      size("feedback_tolerance", &RunConfig::feedback_tolerance);
      return m;
    }();
    return t;
  }
};

}  // namespace motionseg
