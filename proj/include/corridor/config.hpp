#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "corridor/antifragility.hpp"
#include "corridor/cima.hpp"
#include "corridor/criticality.hpp"

// Experiment configuration: one JSON file (plus CLI overrides) fully
// determines every output byte of a run. Parsing is strict: unknown keys are
// collected and reported all at once, never ignored.

namespace corridor {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& i : v) s += "\n  - " + i;
    return s;
  }
  std::vector<std::string> issues_;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& loc,
                       std::initializer_list<const char*> allowed,
                       std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back(loc + ": expected an object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) issues.push_back(loc + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read_field(const json& j, const std::string& loc, const char* key, T& out,
                std::vector<std::string>& issues) {
  if (!j.is_object() || !j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    issues.push_back(loc + "." + key + ": wrong type");
  }
}

inline void read_optional_double(const json& j, const std::string& loc, const char* key,
                                 std::optional<double>& out, std::vector<std::string>& issues) {
  if (!j.is_object() || !j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  try {
    out = j.at(key).get<double>();
  } catch (const json::exception&) {
    issues.push_back(loc + "." + key + ": wrong type");
  }
}

}  // namespace detail

struct BalanceGridConfig {
  double grid_start = 0.01;
  double grid_end = 0.99;
  int grid_points = 99;
};

struct EnvConfig {
  double theta0 = 0.0;
  std::string drift_mode = "ar1";
  double drift_param = 0.9;   // RW step scale or AR1 coefficient
  double drift_scale = 0.7;   // AR1 innovation scale
};

struct AgentConfig {
  double mu0 = 0.0;
  double alpha = 1.0;
  double omega0 = 0.3;
  int window = 512;
  double p_clamp = 1e-6;
  double variance_floor = 1e-12;
};

struct ScheduleConfig {
  std::string kind = "constant";
  double base_sigma_sq = 0.2;
  double magnitude = 0.0;
  std::int64_t onset = 0;
  std::int64_t duration = 0;
};

struct CimaBlockConfig {
  std::optional<double> target_p;        // default: golden partition
  std::optional<double> corridor_low;    // default: golden partition
  std::optional<double> corridor_high;   // default: balance maximizer
  double gain_step = 1.0005;
  double noise_inject_sigma_sq = 0.25;
  double deadband = 0.02;
};

struct EpisodeConfig {
  std::int64_t T = 50000;
  bool controller = true;
  double landmark_tolerance = 1e-10;
  EnvConfig env;
  AgentConfig agent;
  ScheduleConfig schedule;
  CimaBlockConfig cima;
};

struct SyntheticPayoffConfig {
  bool enabled = false;
  double quadratic = 0.0;  // phi(m) = quadratic*m^2 + linear*m + constant + noise
  double linear = 0.0;
  double constant = 0.0;
  double noise_sd = 0.0;
};

struct SweepConfig {
  int trials = 50;
  std::vector<double> magnitudes;  // empty: 7 log-spaced in [0.25, 16]
  std::int64_t T = 6000;
  std::string schedule_kind = "pulse";
  double base_sigma_sq = 0.25;
  std::int64_t onset = -1;  // -1: T/2
  std::int64_t duration = 400;
  std::int64_t window = 2000;
  std::int64_t settle = 500;
  bool controller = true;
  int bootstrap_resamples = 1000;
  SyntheticPayoffConfig synthetic;
};

struct DiagnoseConfig {
  int segment_length = 4096;
  double overlap = 0.5;
  double fit_low = 0.0;
  double fit_high = 0.0;
  double threshold = 0.0;  // auto
  double s_min = 0.0;      // auto
  bool ks_scan = false;
  std::optional<double> synthetic_beta;  // set: diagnose a synthesized series
  std::int64_t synthetic_samples = 65536;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 42;
  std::string output_dir = "out";
  std::string format = "csv";  // csv | jsonl
  int workers = 1;
  BalanceGridConfig balance;
  EpisodeConfig episode;
  SweepConfig sweep;
  DiagnoseConfig diagnose;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::ordered_json to_json() const;
  void validate() const;  // throws ConfigError listing every problem
  std::vector<double> resolved_magnitudes() const;
  std::int64_t resolved_sweep_onset() const { return sweep.onset >= 0 ? sweep.onset : sweep.T / 2; }
};

inline std::vector<double> ExperimentConfig::resolved_magnitudes() const {
  if (!sweep.magnitudes.empty()) return sweep.magnitudes;
  std::vector<double> m;
  for (int k = 0; k < 7; ++k) m.push_back(0.25 * std::pow(2.0, k));
  return m;
}

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::read_field;
  using detail::read_optional_double;
  std::vector<std::string> issues;
  ExperimentConfig c;

  check_keys(j, "$", {"master_seed", "output_dir", "format", "workers", "balance", "episode",
                      "sweep", "diagnose"},
             issues);
  read_field(j, "$", "master_seed", c.master_seed, issues);
  read_field(j, "$", "output_dir", c.output_dir, issues);
  read_field(j, "$", "format", c.format, issues);
  read_field(j, "$", "workers", c.workers, issues);

  if (j.contains("balance")) {
    const auto& b = j.at("balance");
    check_keys(b, "$.balance", {"grid_start", "grid_end", "grid_points"}, issues);
    read_field(b, "$.balance", "grid_start", c.balance.grid_start, issues);
    read_field(b, "$.balance", "grid_end", c.balance.grid_end, issues);
    read_field(b, "$.balance", "grid_points", c.balance.grid_points, issues);
  }

  if (j.contains("episode")) {
    const auto& e = j.at("episode");
    check_keys(e, "$.episode",
               {"T", "controller", "landmark_tolerance", "env", "agent", "schedule", "cima"},
               issues);
    read_field(e, "$.episode", "T", c.episode.T, issues);
    read_field(e, "$.episode", "controller", c.episode.controller, issues);
    read_field(e, "$.episode", "landmark_tolerance", c.episode.landmark_tolerance, issues);
    if (e.contains("env")) {
      const auto& v = e.at("env");
      check_keys(v, "$.episode.env", {"theta0", "drift_mode", "drift_param", "drift_scale"},
                 issues);
      read_field(v, "$.episode.env", "theta0", c.episode.env.theta0, issues);
      read_field(v, "$.episode.env", "drift_mode", c.episode.env.drift_mode, issues);
      read_field(v, "$.episode.env", "drift_param", c.episode.env.drift_param, issues);
      read_field(v, "$.episode.env", "drift_scale", c.episode.env.drift_scale, issues);
    }
    if (e.contains("agent")) {
      const auto& v = e.at("agent");
      check_keys(v, "$.episode.agent",
                 {"mu0", "alpha", "omega0", "window", "p_clamp", "variance_floor"}, issues);
      read_field(v, "$.episode.agent", "mu0", c.episode.agent.mu0, issues);
      read_field(v, "$.episode.agent", "alpha", c.episode.agent.alpha, issues);
      read_field(v, "$.episode.agent", "omega0", c.episode.agent.omega0, issues);
      read_field(v, "$.episode.agent", "window", c.episode.agent.window, issues);
      read_field(v, "$.episode.agent", "p_clamp", c.episode.agent.p_clamp, issues);
      read_field(v, "$.episode.agent", "variance_floor", c.episode.agent.variance_floor, issues);
    }
    if (e.contains("schedule")) {
      const auto& v = e.at("schedule");
      check_keys(v, "$.episode.schedule", {"kind", "base_sigma_sq", "magnitude", "onset", "duration"},
                 issues);
      read_field(v, "$.episode.schedule", "kind", c.episode.schedule.kind, issues);
      read_field(v, "$.episode.schedule", "base_sigma_sq", c.episode.schedule.base_sigma_sq, issues);
      read_field(v, "$.episode.schedule", "magnitude", c.episode.schedule.magnitude, issues);
      read_field(v, "$.episode.schedule", "onset", c.episode.schedule.onset, issues);
      read_field(v, "$.episode.schedule", "duration", c.episode.schedule.duration, issues);
    }
    if (e.contains("cima")) {
      const auto& v = e.at("cima");
      check_keys(v, "$.episode.cima",
                 {"target_p", "corridor_low", "corridor_high", "gain_step",
                  "noise_inject_sigma_sq", "deadband"},
                 issues);
      read_optional_double(v, "$.episode.cima", "target_p", c.episode.cima.target_p, issues);
      read_optional_double(v, "$.episode.cima", "corridor_low", c.episode.cima.corridor_low, issues);
      read_optional_double(v, "$.episode.cima", "corridor_high", c.episode.cima.corridor_high,
                           issues);
      read_field(v, "$.episode.cima", "gain_step", c.episode.cima.gain_step, issues);
      read_field(v, "$.episode.cima", "noise_inject_sigma_sq",
                 c.episode.cima.noise_inject_sigma_sq, issues);
      read_field(v, "$.episode.cima", "deadband", c.episode.cima.deadband, issues);
    }
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, "$.sweep",
               {"trials", "magnitudes", "T", "schedule_kind", "base_sigma_sq", "onset", "duration",
                "window", "settle", "controller", "bootstrap_resamples", "synthetic"},
               issues);
    read_field(s, "$.sweep", "trials", c.sweep.trials, issues);
    read_field(s, "$.sweep", "magnitudes", c.sweep.magnitudes, issues);
    read_field(s, "$.sweep", "T", c.sweep.T, issues);
    read_field(s, "$.sweep", "schedule_kind", c.sweep.schedule_kind, issues);
    read_field(s, "$.sweep", "base_sigma_sq", c.sweep.base_sigma_sq, issues);
    read_field(s, "$.sweep", "onset", c.sweep.onset, issues);
    read_field(s, "$.sweep", "duration", c.sweep.duration, issues);
    read_field(s, "$.sweep", "window", c.sweep.window, issues);
    read_field(s, "$.sweep", "settle", c.sweep.settle, issues);
    read_field(s, "$.sweep", "controller", c.sweep.controller, issues);
    read_field(s, "$.sweep", "bootstrap_resamples", c.sweep.bootstrap_resamples, issues);
    if (s.contains("synthetic")) {
      const auto& v = s.at("synthetic");
      check_keys(v, "$.sweep.synthetic", {"enabled", "quadratic", "linear", "constant", "noise_sd"},
                 issues);
      read_field(v, "$.sweep.synthetic", "enabled", c.sweep.synthetic.enabled, issues);
      read_field(v, "$.sweep.synthetic", "quadratic", c.sweep.synthetic.quadratic, issues);
      read_field(v, "$.sweep.synthetic", "linear", c.sweep.synthetic.linear, issues);
      read_field(v, "$.sweep.synthetic", "constant", c.sweep.synthetic.constant, issues);
      read_field(v, "$.sweep.synthetic", "noise_sd", c.sweep.synthetic.noise_sd, issues);
    }
  }

  if (j.contains("diagnose")) {
    const auto& d = j.at("diagnose");
    check_keys(d, "$.diagnose",
               {"segment_length", "overlap", "fit_low", "fit_high", "threshold", "s_min",
                "ks_scan", "synthetic_beta", "synthetic_samples"},
               issues);
    read_field(d, "$.diagnose", "segment_length", c.diagnose.segment_length, issues);
    read_field(d, "$.diagnose", "overlap", c.diagnose.overlap, issues);
    read_field(d, "$.diagnose", "fit_low", c.diagnose.fit_low, issues);
    read_field(d, "$.diagnose", "fit_high", c.diagnose.fit_high, issues);
    read_field(d, "$.diagnose", "threshold", c.diagnose.threshold, issues);
    read_field(d, "$.diagnose", "s_min", c.diagnose.s_min, issues);
    read_field(d, "$.diagnose", "ks_scan", c.diagnose.ks_scan, issues);
    read_optional_double(d, "$.diagnose", "synthetic_beta", c.diagnose.synthetic_beta, issues);
    read_field(d, "$.diagnose", "synthetic_samples", c.diagnose.synthetic_samples, issues);
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return from_json(j);
}

inline void ExperimentConfig::validate() const {
  std::vector<std::string> issues;
  auto require = [&issues](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };

  require(format == "csv" || format == "jsonl", "$.format: must be 'csv' or 'jsonl'");
  require(workers >= 1, "$.workers: must be >= 1");

  require(balance.grid_start > 0.0 && balance.grid_start < 1.0,
          "$.balance.grid_start: must be in (0, 1)");
  require(balance.grid_end > 0.0 && balance.grid_end < 1.0, "$.balance.grid_end: must be in (0, 1)");
  require(balance.grid_start < balance.grid_end, "$.balance: grid_start must be < grid_end");
  require(balance.grid_points >= 2, "$.balance.grid_points: must be >= 2");

  require(episode.T >= 1, "$.episode.T: must be >= 1");
  require(episode.landmark_tolerance > 0.0, "$.episode.landmark_tolerance: must be > 0");
  require(episode.env.drift_mode == "static" || episode.env.drift_mode == "random_walk" ||
              episode.env.drift_mode == "ar1",
          "$.episode.env.drift_mode: must be 'static', 'random_walk' or 'ar1'");
  if (episode.env.drift_mode == "ar1") {
    require(std::abs(episode.env.drift_param) < 1.0,
            "$.episode.env.drift_param: AR1 coefficient magnitude must be < 1");
  }
  require(episode.agent.alpha > 0.0 && episode.agent.alpha <= 2.0,
          "$.episode.agent.alpha: must be in (0, 2]");
  require(episode.agent.omega0 > 0.0 && episode.agent.omega0 <= 1.0,
          "$.episode.agent.omega0: must be in (0, 1]");
  require(episode.agent.alpha * episode.agent.omega0 < 2.0,
          "$.episode.agent: alpha*omega0 must be < 2");
  require(episode.agent.window >= 8, "$.episode.agent.window: must be >= 8");
  require(episode.agent.p_clamp > 0.0 && episode.agent.p_clamp < 0.5,
          "$.episode.agent.p_clamp: must be in (0, 0.5)");
  require(episode.agent.variance_floor >= 0.0, "$.episode.agent.variance_floor: must be >= 0");
  require(episode.schedule.kind == "constant" || episode.schedule.kind == "step" ||
              episode.schedule.kind == "pulse" || episode.schedule.kind == "ramp",
          "$.episode.schedule.kind: must be 'constant', 'step', 'pulse' or 'ramp'");
  require(episode.schedule.base_sigma_sq >= 0.0, "$.episode.schedule.base_sigma_sq: must be >= 0");
  require(episode.schedule.magnitude >= 0.0, "$.episode.schedule.magnitude: must be >= 0");
  require(episode.schedule.onset >= 0, "$.episode.schedule.onset: must be >= 0");
  require(episode.schedule.duration >= 0, "$.episode.schedule.duration: must be >= 0");
  for (const auto& [key, val] :
       std::initializer_list<std::pair<const char*, std::optional<double>>>{
           {"target_p", episode.cima.target_p},
           {"corridor_low", episode.cima.corridor_low},
           {"corridor_high", episode.cima.corridor_high}}) {
    if (val) {
      require(*val > 0.0 && *val < 1.0,
              std::string("$.episode.cima.") + key + ": must be in (0, 1)");
    }
  }
  require(episode.cima.gain_step > 0.0, "$.episode.cima.gain_step: must be > 0");
  require(episode.cima.noise_inject_sigma_sq >= 0.0,
          "$.episode.cima.noise_inject_sigma_sq: must be >= 0");
  require(episode.cima.deadband >= 0.0, "$.episode.cima.deadband: must be >= 0");

  require(sweep.trials >= 1, "$.sweep.trials: must be >= 1");
  const auto mags = resolved_magnitudes();
  require(mags.size() >= 3, "$.sweep.magnitudes: needs at least 3 entries");
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (mags[i] < 0.0) {
      issues.push_back("$.sweep.magnitudes: entries must be >= 0");
      break;
    }
    if (i > 0 && mags[i] <= mags[i - 1]) {
      issues.push_back("$.sweep.magnitudes: entries must be strictly increasing");
      break;
    }
  }
  require(sweep.T >= 1, "$.sweep.T: must be >= 1");
  require(sweep.schedule_kind == "constant" || sweep.schedule_kind == "step" ||
              sweep.schedule_kind == "pulse" || sweep.schedule_kind == "ramp",
          "$.sweep.schedule_kind: must be 'constant', 'step', 'pulse' or 'ramp'");
  require(sweep.base_sigma_sq >= 0.0, "$.sweep.base_sigma_sq: must be >= 0");
  require(sweep.duration >= 0, "$.sweep.duration: must be >= 0");
  require(sweep.window >= 1, "$.sweep.window: must be >= 1");
  require(sweep.settle >= 0, "$.sweep.settle: must be >= 0");
  require(sweep.bootstrap_resamples >= 1, "$.sweep.bootstrap_resamples: must be >= 1");
  if (!sweep.synthetic.enabled) {
    const std::int64_t onset = resolved_sweep_onset();
    require(onset - sweep.window >= 0,
            "$.sweep: pre-perturbation window does not fit before the onset");
    require(onset + sweep.settle + sweep.window <= sweep.T,
            "$.sweep: post-perturbation window does not fit inside T");
  }
  require(sweep.synthetic.noise_sd >= 0.0, "$.sweep.synthetic.noise_sd: must be >= 0");

  require(diagnose.segment_length >= 8 &&
              detail::is_power_of_two(static_cast<std::size_t>(diagnose.segment_length)),
          "$.diagnose.segment_length: must be a power of two >= 8");
  require(diagnose.overlap >= 0.0 && diagnose.overlap < 1.0,
          "$.diagnose.overlap: must be in [0, 1)");
  require(diagnose.synthetic_samples >= 16, "$.diagnose.synthetic_samples: must be >= 16");

  if (!issues.empty()) throw ConfigError(std::move(issues));
}

inline nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir;
  j["format"] = format;
  j["workers"] = workers;
  j["balance"] = {{"grid_start", balance.grid_start},
                  {"grid_end", balance.grid_end},
                  {"grid_points", balance.grid_points}};
  nlohmann::ordered_json e;
  e["T"] = episode.T;
  e["controller"] = episode.controller;
  e["landmark_tolerance"] = episode.landmark_tolerance;
  e["env"] = {{"theta0", episode.env.theta0},
              {"drift_mode", episode.env.drift_mode},
              {"drift_param", episode.env.drift_param},
              {"drift_scale", episode.env.drift_scale}};
  e["agent"] = {{"mu0", episode.agent.mu0},     {"alpha", episode.agent.alpha},
                {"omega0", episode.agent.omega0}, {"window", episode.agent.window},
                {"p_clamp", episode.agent.p_clamp}, {"variance_floor", episode.agent.variance_floor}};
  e["schedule"] = {{"kind", episode.schedule.kind},
                   {"base_sigma_sq", episode.schedule.base_sigma_sq},
                   {"magnitude", episode.schedule.magnitude},
                   {"onset", episode.schedule.onset},
                   {"duration", episode.schedule.duration}};
  nlohmann::ordered_json cm;
  const Landmarks lm = compute_landmarks(episode.landmark_tolerance);
  cm["target_p"] = episode.cima.target_p ? *episode.cima.target_p : lm.p_phi.value();
  cm["corridor_low"] = episode.cima.corridor_low ? *episode.cima.corridor_low : lm.p_phi.value();
  cm["corridor_high"] =
      episode.cima.corridor_high ? *episode.cima.corridor_high : lm.p_star.value();
  cm["gain_step"] = episode.cima.gain_step;
  cm["noise_inject_sigma_sq"] = episode.cima.noise_inject_sigma_sq;
  cm["deadband"] = episode.cima.deadband;
  e["cima"] = cm;
  j["episode"] = e;

  nlohmann::ordered_json s;
  s["trials"] = sweep.trials;
  s["magnitudes"] = resolved_magnitudes();
  s["T"] = sweep.T;
  s["schedule_kind"] = sweep.schedule_kind;
  s["base_sigma_sq"] = sweep.base_sigma_sq;
  s["onset"] = resolved_sweep_onset();
  s["duration"] = sweep.duration;
  s["window"] = sweep.window;
  s["settle"] = sweep.settle;
  s["controller"] = sweep.controller;
  s["bootstrap_resamples"] = sweep.bootstrap_resamples;
  s["synthetic"] = {{"enabled", sweep.synthetic.enabled},
                    {"quadratic", sweep.synthetic.quadratic},
                    {"linear", sweep.synthetic.linear},
                    {"constant", sweep.synthetic.constant},
                    {"noise_sd", sweep.synthetic.noise_sd}};
  j["sweep"] = s;

  nlohmann::ordered_json d;
  d["segment_length"] = diagnose.segment_length;
  d["overlap"] = diagnose.overlap;
  d["fit_low"] = diagnose.fit_low;
  d["fit_high"] = diagnose.fit_high;
  d["threshold"] = diagnose.threshold;
  d["s_min"] = diagnose.s_min;
  d["ks_scan"] = diagnose.ks_scan;
  if (diagnose.synthetic_beta) {
    d["synthetic_beta"] = *diagnose.synthetic_beta;
  } else {
    d["synthetic_beta"] = nullptr;
  }
  d["synthetic_samples"] = diagnose.synthetic_samples;
  j["diagnose"] = d;
  return j;
}

// Builders turning validated config blocks into library objects.

inline DriftMode parse_drift_mode(const std::string& s) {
  if (s == "static") return DriftMode::Static;
  if (s == "random_walk") return DriftMode::RandomWalk;
  return DriftMode::Ar1;
}

inline ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "constant") return ScheduleKind::Constant;
  if (s == "step") return ScheduleKind::Step;
  if (s == "pulse") return ScheduleKind::Pulse;
  return ScheduleKind::Ramp;
}

inline EnvState make_env(const EnvConfig& c, std::uint64_t stream_seed) {
  EnvState env(stream_seed);
  env.theta = c.theta0;
  env.drift_mode = parse_drift_mode(c.drift_mode);
  env.drift_param = c.drift_param;
  env.drift_scale = c.drift_scale;
  return env;
}

inline AgentState make_agent(const AgentConfig& c) {
  AgentState a(c.mu0, c.alpha, c.omega0, static_cast<std::size_t>(c.window));
  a.p_clamp = c.p_clamp;
  a.variance_floor = c.variance_floor;
  return a;
}

inline PerturbationSchedule make_schedule(const ScheduleConfig& c) {
  PerturbationSchedule s;
  s.kind = parse_schedule_kind(c.kind);
  s.base_sigma_sq = c.base_sigma_sq;
  s.magnitude = c.magnitude;
  s.onset = c.onset;
  s.duration = c.duration;
  return s;
}

inline CimaConfig make_cima(const CimaBlockConfig& c, const Landmarks& lm) {
  CimaConfig cfg(lm);
  if (c.target_p) cfg.target_p = Probability(*c.target_p);
  if (c.corridor_low) cfg.corridor_low = Probability(*c.corridor_low);
  if (c.corridor_high) cfg.corridor_high = Probability(*c.corridor_high);
  cfg.gain_step = c.gain_step;
  cfg.noise_inject_sigma_sq = c.noise_inject_sigma_sq;
  cfg.deadband = c.deadband;
  cfg.validate();
  return cfg;
}

inline PerturbationLadder make_ladder(const ExperimentConfig& c) {
  PerturbationLadder l;
  l.magnitudes = c.resolved_magnitudes();
  l.shape.kind = parse_schedule_kind(c.sweep.schedule_kind);
  l.shape.base_sigma_sq = c.sweep.base_sigma_sq;
  l.shape.onset = c.resolved_sweep_onset();
  l.shape.duration = c.sweep.duration;
  return l;
}

inline SweepScenario make_sweep_scenario(const ExperimentConfig& c, const Landmarks& lm) {
  SweepScenario sc(make_env(c.episode.env, 0), make_agent(c.episode.agent),
                   make_cima(c.episode.cima, lm), lm);
  sc.controller = c.sweep.controller;
  sc.T = c.sweep.T;
  sc.payoff_window = c.sweep.window;
  sc.settle = c.sweep.settle;
  sc.master_seed = c.master_seed;
  return sc;
}

}  // namespace corridor
