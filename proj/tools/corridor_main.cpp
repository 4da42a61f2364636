// corridor: deterministic experiments around the informational balance
// function. Subcommands: balance, simulate, sweep, diagnose. Every output is
// a pure function of (config, master seed); a manifest with per-file
// checksums is written next to the results.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corridor/balance.hpp"
#include "corridor/config.hpp"
#include "corridor/criticality.hpp"
#include "corridor/manifest.hpp"
#include "corridor/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct OutputSink {
  fs::path dir;
  corridor::RunManifest manifest;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  explicit OutputSink(const std::string& out_dir, const std::string& command,
                      const corridor::ExperimentConfig& cfg)
      : dir(out_dir) {
    fs::create_directories(dir);
    manifest.command = command;
    manifest.master_seed = cfg.master_seed;
    manifest.config_snapshot = cfg.to_json();
  }

  fs::path open(const std::string& name, std::ofstream& os) {
    const fs::path p = dir / name;
    os.open(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + p.string());
    return p;
  }

  void record(const std::string& name) {
    corridor::OutputRecord rec;
    rec.path = name;
    rec.checksum_fnv1a64 = corridor::fnv1a64_file((dir / name).string(), &rec.bytes);
    manifest.outputs.push_back(rec);
  }

  void finalize() {
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write manifest.json");
    os << manifest.to_json().dump(2) << '\n';
  }
};

int cmd_balance(const corridor::ExperimentConfig& cfg) {
  using namespace corridor;
  OutputSink sink(cfg.output_dir, "balance", cfg);

  const auto& g = cfg.balance;
  std::ofstream grid;
  sink.open("balance_grid.csv", grid);
  grid << "p,f,f_prime,f_double_prime,entropy,term_unknown,term_known\n";
  for (int i = 0; i < g.grid_points; ++i) {
    const double p = g.grid_start + (g.grid_end - g.grid_start) * static_cast<double>(i) /
                                        static_cast<double>(g.grid_points - 1);
    const BalanceProfile prof = balance_profile(Probability(p));
    grid << format_double(p) << ',' << format_double(prof.f) << ','
         << format_double(prof.f_prime) << ',' << format_double(prof.f_double_prime) << ','
         << format_double(bernoulli_entropy(prof.p)) << ',' << format_double(prof.term_unknown)
         << ',' << format_double(prof.term_known) << '\n';
  }
  grid.close();
  sink.record("balance_grid.csv");

  const Landmarks lm = compute_landmarks(cfg.episode.landmark_tolerance);
  ordered_json j;
  j["p_star"] = lm.p_star.value();
  j["f_at_p_star"] = lm.f_at_p_star;
  j["p_phi"] = lm.p_phi.value();
  j["f_at_p_phi"] = balance(lm.p_phi);
  j["p_zero"] = lm.p_zero.value();
  j["tolerance"] = lm.tolerance;
  std::ofstream lmj;
  sink.open("landmarks.json", lmj);
  lmj << j.dump(2) << '\n';
  lmj.close();
  sink.record("landmarks.json");

  sink.finalize();
  return 0;
}

int cmd_simulate(const corridor::ExperimentConfig& cfg) {
  using namespace corridor;
  OutputSink sink(cfg.output_dir, "simulate", cfg);

  const Landmarks lm = compute_landmarks(cfg.episode.landmark_tolerance);
  EnvState env = make_env(cfg.episode.env, derive_stream(cfg.master_seed, {stream_tag::kEnvironment}));
  AgentState agent = make_agent(cfg.episode.agent);
  const PerturbationSchedule schedule = make_schedule(cfg.episode.schedule);

  if (cfg.episode.T < cfg.episode.agent.window) {
    std::cerr << "warning: T (" << cfg.episode.T << ") is below the estimation window ("
              << cfg.episode.agent.window << "); p_hat and diagnostics stay empty\n";
  }

  const bool jsonl = cfg.format == "jsonl";
  if (cfg.episode.controller) {
    const CimaConfig cc = make_cima(cfg.episode.cima, lm);
    const auto steps = run_cima(env, agent, schedule, cc, lm, cfg.episode.T);
    std::vector<StepRecord> trace;
    trace.reserve(steps.size());
    for (const auto& s : steps) trace.push_back(s.step);

    std::ofstream tf;
    const std::string tname = jsonl ? "trace.jsonl" : "trace.csv";
    sink.open(tname, tf);
    jsonl ? write_trace_jsonl(tf, trace) : write_trace_csv(tf, trace);
    tf.close();
    sink.record(tname);

    std::ofstream df;
    const std::string dname = jsonl ? "diagnostics.jsonl" : "diagnostics.csv";
    sink.open(dname, df);
    jsonl ? write_diagnostics_jsonl(df, steps) : write_diagnostics_csv(df, steps);
    df.close();
    sink.record(dname);
  } else {
    const auto trace = run_episode(env, agent, schedule, cfg.episode.T);
    std::ofstream tf;
    const std::string tname = jsonl ? "trace.jsonl" : "trace.csv";
    sink.open(tname, tf);
    jsonl ? write_trace_jsonl(tf, trace) : write_trace_csv(tf, trace);
    tf.close();
    sink.record(tname);
  }

  sink.finalize();
  return 0;
}

// Synthetic payoff curve: phi(m) plus optional per-trial noise, drawn per
// (magnitude, trial) from the same stream layout as simulated sweeps.
std::vector<corridor::PayoffSample> synthetic_curve(const corridor::ExperimentConfig& cfg) {
  using namespace corridor;
  const auto& syn = cfg.sweep.synthetic;
  std::vector<PayoffSample> curve;
  const auto mags = cfg.resolved_magnitudes();
  for (std::size_t i = 0; i < mags.size(); ++i) {
    PayoffSample s;
    s.magnitude = mags[i];
    s.trials = cfg.sweep.trials;
    const double base =
        syn.quadratic * mags[i] * mags[i] + syn.linear * mags[i] + syn.constant;
    for (int j = 0; j < cfg.sweep.trials; ++j) {
      Rng rng(derive_stream(cfg.master_seed,
                            {stream_tag::kSweep, static_cast<std::uint64_t>(i),
                             static_cast<std::uint64_t>(j)}));
      const double phi = base + (syn.noise_sd > 0.0 ? syn.noise_sd * rng.normal() : 0.0);
      s.trial_phis.push_back(phi);
      s.phi += phi;
    }
    s.phi /= static_cast<double>(cfg.sweep.trials);
    if (cfg.sweep.trials > 1) {
      s.phi_std_error =
          std::sqrt(sample_variance(s.trial_phis) / static_cast<double>(cfg.sweep.trials));
    }
    curve.push_back(std::move(s));
  }
  return curve;
}

int cmd_sweep(const corridor::ExperimentConfig& cfg) {
  using namespace corridor;
  OutputSink sink(cfg.output_dir, "sweep", cfg);

  if (cfg.sweep.trials < 30) {
    std::cerr << "warning: trials=" << cfg.sweep.trials
              << " is below 30; the bootstrap interval may be unreliable\n";
  }

  const Landmarks lm = compute_landmarks(cfg.episode.landmark_tolerance);
  std::vector<PayoffSample> curve;
  if (cfg.sweep.synthetic.enabled) {
    curve = synthetic_curve(cfg);
  } else {
    PerturbationLadder ladder = make_ladder(cfg);
    SweepScenario scenario = make_sweep_scenario(cfg, lm);
    curve = payoff_curve(ladder, scenario, cfg.sweep.trials, cfg.workers);
  }

  Rng boot_rng(derive_stream(cfg.master_seed, {stream_tag::kBootstrap}));
  const ConvexityVerdict verdict = convexity(curve, boot_rng, cfg.sweep.bootstrap_resamples);

  std::ofstream cf;
  sink.open("payoff_curve.csv", cf);
  write_curve_csv(cf, curve);
  cf.close();
  sink.record("payoff_curve.csv");

  ordered_json j;
  j["label"] = to_string(verdict.label);
  j["mean_second_difference"] = verdict.mean_second_difference;
  j["ci_low"] = verdict.ci_low;
  j["ci_high"] = verdict.ci_high;
  j["second_differences"] = verdict.second_differences;
  j["magnitudes"] = cfg.resolved_magnitudes();
  j["trials"] = cfg.sweep.trials;
  j["bootstrap_resamples"] = cfg.sweep.bootstrap_resamples;
  j["controller"] = cfg.sweep.synthetic.enabled ? false : cfg.sweep.controller;
  j["synthetic"] = cfg.sweep.synthetic.enabled;
  std::ofstream vf;
  sink.open("verdict.json", vf);
  vf << j.dump(2) << '\n';
  vf.close();
  sink.record("verdict.json");

  sink.finalize();
  return 0;
}

int cmd_diagnose(const corridor::ExperimentConfig& cfg, const std::string& trace_path) {
  using namespace corridor;
  OutputSink sink(cfg.output_dir, "diagnose", cfg);

  std::vector<double> series;
  if (!trace_path.empty()) {
    const auto trace = read_trace_file(trace_path);
    series.reserve(trace.size());
    for (const auto& r : trace) series.push_back(r.epsilon);
  } else if (cfg.diagnose.synthetic_beta) {
    Rng rng(derive_stream(cfg.master_seed, {stream_tag::kSynthesis}));
    series = synthesize_power_law_noise(static_cast<std::size_t>(cfg.diagnose.synthetic_samples),
                                        *cfg.diagnose.synthetic_beta, rng);
  } else {
    EnvState env =
        make_env(cfg.episode.env, derive_stream(cfg.master_seed, {stream_tag::kEnvironment}));
    AgentState agent = make_agent(cfg.episode.agent);
    const auto trace =
        run_episode(env, agent, make_schedule(cfg.episode.schedule), cfg.episode.T);
    series.reserve(trace.size());
    for (const auto& r : trace) series.push_back(r.epsilon);
  }

  CriticalityConfig cc;
  cc.segment_length = static_cast<std::size_t>(cfg.diagnose.segment_length);
  cc.overlap_fraction = cfg.diagnose.overlap;
  cc.fit_low = cfg.diagnose.fit_low;
  cc.fit_high = cfg.diagnose.fit_high;
  cc.threshold = cfg.diagnose.threshold;
  cc.s_min = cfg.diagnose.s_min;
  cc.ks_scan = cfg.diagnose.ks_scan;
  const CriticalityReport rep = criticality_report(series, cc);

  ordered_json j;
  j["beta_hat"] = rep.spectrum.beta_hat;
  j["fit_range"] = {{"low", rep.spectrum.fit_low}, {"high", rep.spectrum.fit_high}};
  j["r_squared"] = rep.spectrum.r_squared;
  j["segments"] = rep.spectrum.segments;
  j["threshold"] = rep.config.threshold;
  j["avalanche_count"] = rep.avalanches.sizes.size();
  j["power_law_available"] = rep.power_law_available;
  if (rep.power_law_available) {
    j["tau_hat"] = rep.power_law.tau_hat;
    j["s_min"] = rep.power_law.s_min;
    j["n_tail"] = rep.power_law.n_tail;
    j["ks_distance"] = rep.power_law.ks_distance;
    j["std_error"] = rep.power_law.std_error;
  } else {
    j["note"] = rep.power_law_note;
  }
  std::ofstream rf;
  sink.open("criticality_report.json", rf);
  rf << j.dump(2) << '\n';
  rf.close();
  sink.record("criticality_report.json");

  std::ofstream sf;
  sink.open("spectrum.csv", sf);
  sf << "frequency,power\n";
  for (std::size_t i = 0; i < rep.spectrum.frequencies.size(); ++i) {
    sf << format_double(rep.spectrum.frequencies[i]) << ','
       << format_double(rep.spectrum.power[i]) << '\n';
  }
  sf.close();
  sink.record("spectrum.csv");

  // log-binned avalanche-size histogram
  std::ofstream hf;
  sink.open("avalanche_hist.csv", hf);
  hf << "bin_low,bin_high,count,density\n";
  if (!rep.avalanches.sizes.empty()) {
    std::vector<double> sizes = rep.avalanches.sizes;
    std::sort(sizes.begin(), sizes.end());
    const double lo = sizes.front();
    const double hi = sizes.back();
    const int bins = 24;
    const double ratio = hi > lo ? std::pow(hi / lo, 1.0 / bins) : 2.0;
    double edge = lo;
    std::size_t idx = 0;
    const double total = static_cast<double>(sizes.size());
    for (int b = 0; b < bins && idx < sizes.size(); ++b) {
      const double next = (b == bins - 1) ? hi * (1.0 + 1e-12) : edge * ratio;
      std::size_t count = 0;
      while (idx < sizes.size() && sizes[idx] < next) {
        ++count;
        ++idx;
      }
      if (b == bins - 1) {
        count += sizes.size() - idx;  // close the last bin on the max
        idx = sizes.size();
      }
      const double width = next - edge;
      hf << format_double(edge) << ',' << format_double(next) << ',' << count << ','
         << format_double(width > 0.0 ? static_cast<double>(count) / (total * width) : 0.0)
         << '\n';
      edge = next;
    }
  }
  hf.close();
  sink.record("avalanche_hist.csv");

  sink.finalize();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic informational-balance experiments"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->type_name("PATH");
  std::uint64_t seed = 0;
  const auto* seed_opt = app.add_option("--seed", seed, "master seed override")->type_name("U64");
  std::string out_dir;
  const auto* out_opt = app.add_option("--out", out_dir, "output directory override");
  int workers = 0;
  const auto* workers_opt = app.add_option("--workers", workers, "worker threads for sweeps");
  std::string format;
  const auto* format_opt =
      app.add_option("--format", format, "trace format: csv | jsonl")->type_name("FMT");

  auto* balance_cmd = app.add_subcommand("balance", "balance-function grid and landmarks");
  double grid_start = 0.0, grid_end = 0.0;
  int grid_points = 0;
  const auto* gs_opt = balance_cmd->add_option("--start", grid_start, "grid start");
  const auto* ge_opt = balance_cmd->add_option("--end", grid_end, "grid end");
  const auto* gp_opt = balance_cmd->add_option("--points", grid_points, "grid points");

  auto* simulate_cmd = app.add_subcommand("simulate", "run one episode (closed or open loop)");
  std::int64_t sim_steps = 0;
  const auto* steps_opt = simulate_cmd->add_option("--steps", sim_steps, "episode length");
  bool sim_open_loop = false;
  simulate_cmd->add_flag("--open-loop", sim_open_loop, "disable the controller");

  auto* sweep_cmd = app.add_subcommand("sweep", "payoff curve over a perturbation ladder");
  int sweep_trials = 0;
  const auto* trials_opt = sweep_cmd->add_option("--trials", sweep_trials, "trials per magnitude");
  bool sweep_open_loop = false;
  sweep_cmd->add_flag("--open-loop", sweep_open_loop, "measure payoffs without the controller");

  auto* diagnose_cmd = app.add_subcommand("diagnose", "criticality markers for a trace");
  std::string trace_path;
  diagnose_cmd->add_option("--trace", trace_path, "existing trace file (.csv or .jsonl)");
  double synthetic_beta = 0.0;
  const auto* beta_opt = diagnose_cmd->add_option("--synthetic-beta", synthetic_beta,
                                                  "diagnose synthesized 1/f^beta noise instead");
  std::int64_t synthetic_samples = 0;
  const auto* samples_opt =
      diagnose_cmd->add_option("--samples", synthetic_samples, "synthetic series length");

  CLI11_PARSE(app, argc, argv);

  try {
    corridor::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = corridor::ExperimentConfig::from_file(config_path);
    if (*seed_opt) cfg.master_seed = seed;
    if (*out_opt) cfg.output_dir = out_dir;
    if (*workers_opt) cfg.workers = workers;
    if (*format_opt) cfg.format = format;
    if (*gs_opt) cfg.balance.grid_start = grid_start;
    if (*ge_opt) cfg.balance.grid_end = grid_end;
    if (*gp_opt) cfg.balance.grid_points = grid_points;
    if (*steps_opt) cfg.episode.T = sim_steps;
    if (sim_open_loop) cfg.episode.controller = false;
    if (*trials_opt) cfg.sweep.trials = sweep_trials;
    if (sweep_open_loop) cfg.sweep.controller = false;
    if (*beta_opt) cfg.diagnose.synthetic_beta = synthetic_beta;
    if (*samples_opt) cfg.diagnose.synthetic_samples = synthetic_samples;
    cfg.validate();

    if (balance_cmd->parsed()) return cmd_balance(cfg);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (diagnose_cmd->parsed()) return cmd_diagnose(cfg, trace_path);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const corridor::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
