#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "corridor/cima.hpp"
#include "corridor/parallel.hpp"

// Payoff-convexity estimation. The payoff of a perturbation is learning
// progress: mean squared prediction error over a window before the
// perturbation minus the same over a window after it. Convexity of payoff
// in perturbation magnitude is estimated by divided second differences over
// the magnitude grid, with a bootstrap interval over per-trial payoffs.

namespace corridor {

struct PayoffWindows {
  double e_before;
  double e_after;
  double phi;  // e_before - e_after
};

/// Mean squared error over [onset-window, onset) and over
/// [onset+settle, onset+settle+window); settle is the adaptation delay
/// granted after the perturbation hits.
inline PayoffWindows payoff(const std::vector<StepRecord>& trace, std::int64_t onset,
                            std::int64_t window, std::int64_t settle) {
  if (window < 1) throw std::invalid_argument("payoff: window must be >= 1");
  if (settle < 0) throw std::invalid_argument("payoff: settle must be >= 0");
  const std::int64_t n = static_cast<std::int64_t>(trace.size());
  const std::int64_t pre_lo = onset - window;
  const std::int64_t post_lo = onset + settle;
  const std::int64_t post_hi = post_lo + window;
  if (pre_lo < 0 || post_hi > n) {
    throw std::invalid_argument(
        "payoff: windows do not fit: need pre [" + std::to_string(pre_lo) + ", " +
        std::to_string(onset) + ") and post [" + std::to_string(post_lo) + ", " +
        std::to_string(post_hi) + ") inside a trace of length " + std::to_string(n));
  }
  double before = 0.0;
  for (std::int64_t t = pre_lo; t < onset; ++t) before += trace[t].epsilon * trace[t].epsilon;
  before /= static_cast<double>(window);
  double after = 0.0;
  for (std::int64_t t = post_lo; t < post_hi; ++t) after += trace[t].epsilon * trace[t].epsilon;
  after /= static_cast<double>(window);
  return {before, after, before - after};
}

struct PayoffSample {
  double magnitude = 0.0;
  double phi = 0.0;       // mean over trials
  double e_before = 0.0;  // mean over trials
  double e_after = 0.0;
  int trials = 0;
  double phi_std_error = 0.0;
  std::vector<double> trial_phis;  // retained for the bootstrap; not exported
};

/// Everything needed to run one ladder episode: templates for the
/// environment and agent (reseeded/copied per trial), the controller
/// configuration, and the payoff window geometry.
struct SweepScenario {
  EnvState env;
  AgentState agent;
  bool controller = true;
  CimaConfig cima;
  Landmarks landmarks;
  std::int64_t T = 6000;
  std::int64_t payoff_window = 2000;
  std::int64_t settle = 500;
  std::uint64_t master_seed = 42;

  SweepScenario(EnvState e, AgentState a, CimaConfig c, Landmarks lm)
      : env(std::move(e)), agent(std::move(a)), cima(std::move(c)), landmarks(lm) {}
};

namespace detail {

inline PayoffWindows run_one_trial(const SweepScenario& sc, const PerturbationSchedule& sched,
                                   std::uint64_t magnitude_index, std::uint64_t trial_index) {
  EnvState env = sc.env;
  env.rng = Rng(derive_stream(sc.master_seed, {stream_tag::kSweep, magnitude_index, trial_index}));
  std::vector<StepRecord> trace;
  if (sc.controller) {
    auto steps = run_cima(env, sc.agent, sched, sc.cima, sc.landmarks, sc.T);
    trace.reserve(steps.size());
    for (auto& s : steps) trace.push_back(s.step);
  } else {
    trace = run_episode(env, sc.agent, sched, sc.T);
  }
  return payoff(trace, sched.onset, sc.payoff_window, sc.settle);
}

}  // namespace detail

/// One payoff sample per ladder magnitude: `trials` independent episodes per
/// magnitude on pre-split seed streams, aggregated into mean payoff and its
/// standard error. A pure function of (scenario, ladder, trials, master
/// seed); the worker count only changes wall-clock time.
inline std::vector<PayoffSample> payoff_curve(const PerturbationLadder& ladder,
                                              const SweepScenario& scenario, int trials,
                                              int workers = 1) {
  if (trials < 1) throw std::invalid_argument("payoff_curve: trials must be >= 1");
  const auto schedules = ladder_schedules(ladder);
  const std::size_t m = schedules.size();
  std::vector<std::vector<PayoffWindows>> results(m, std::vector<PayoffWindows>(trials));
  std::vector<std::string> failures(m * static_cast<std::size_t>(trials));

  parallel_for(m * static_cast<std::size_t>(trials), workers, [&](std::size_t idx) {
    const std::size_t i = idx / static_cast<std::size_t>(trials);
    const std::size_t j = idx % static_cast<std::size_t>(trials);
    try {
      results[i][j] = detail::run_one_trial(scenario, schedules[i], i, j);
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  });
  for (const auto& msg : failures) {
    if (!msg.empty()) throw std::runtime_error("payoff_curve: trial failed: " + msg);
  }

  std::vector<PayoffSample> curve;
  curve.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    PayoffSample s;
    s.magnitude = ladder.magnitudes[i];
    s.trials = trials;
    s.trial_phis.reserve(trials);
    for (const auto& w : results[i]) {
      s.phi += w.phi;
      s.e_before += w.e_before;
      s.e_after += w.e_after;
      s.trial_phis.push_back(w.phi);
    }
    const double n = static_cast<double>(trials);
    s.phi /= n;
    s.e_before /= n;
    s.e_after /= n;
    if (trials > 1) {
      s.phi_std_error = std::sqrt(sample_variance(s.trial_phis) / n);
    }
    curve.push_back(std::move(s));
  }
  return curve;
}

enum class ConvexityLabel { Fragile, Robust, Antifragile };

inline const char* to_string(ConvexityLabel l) {
  switch (l) {
    case ConvexityLabel::Fragile: return "Fragile";
    case ConvexityLabel::Robust: return "Robust";
    case ConvexityLabel::Antifragile: return "Antifragile";
  }
  return "?";
}

struct ConvexityVerdict {
  std::vector<double> second_differences;  // one per interior grid point
  double mean_second_difference = 0.0;
  double ci_low = 0.0;   // bootstrap 95% interval on the mean second difference
  double ci_high = 0.0;
  ConvexityLabel label = ConvexityLabel::Robust;
};

namespace detail {

// Three-point divided second difference on a possibly uneven grid; exact
// (equal to 2a) for any quadratic a*x^2 + b*x + c.
inline std::vector<double> second_differences(const std::vector<double>& x,
                                              const std::vector<double>& y) {
  std::vector<double> out;
  out.reserve(x.size() - 2);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    out.push_back(2.0 * (right - left) / (x[i + 1] - x[i - 1]));
  }
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Linear-interpolated percentile of a sorted vector, q in [0,1].
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

/// Classifies a payoff curve as Fragile / Robust / Antifragile from the sign
/// of the mean divided second difference, using a percentile bootstrap over
/// the per-trial payoffs: Antifragile when the whole 95% interval is above
/// zero, Fragile when it is below, Robust otherwise.
inline ConvexityVerdict convexity(const std::vector<PayoffSample>& curve, Rng rng,
                                  int resamples = 1000) {
  if (curve.size() < 3) throw std::invalid_argument("convexity: needs at least 3 samples");
  if (resamples < 1) throw std::invalid_argument("convexity: resamples must be >= 1");
  std::vector<double> mags, phis;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (i > 0 && !(curve[i].magnitude > curve[i - 1].magnitude))
      throw std::invalid_argument("convexity: magnitudes must be strictly increasing");
    if (curve[i].trial_phis.empty())
      throw std::invalid_argument("convexity: samples must carry per-trial payoffs");
    mags.push_back(curve[i].magnitude);
    phis.push_back(curve[i].phi);
  }

  ConvexityVerdict v;
  v.second_differences = detail::second_differences(mags, phis);
  v.mean_second_difference = detail::mean_of(v.second_differences);

  std::vector<double> boot(resamples);
  std::vector<double> means(curve.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const auto& tp = curve[i].trial_phis;
      double s = 0.0;
      for (std::size_t k = 0; k < tp.size(); ++k) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform01() * tp.size());
        s += tp[pick < tp.size() ? pick : tp.size() - 1];
      }
      means[i] = s / static_cast<double>(tp.size());
    }
    boot[b] = detail::mean_of(detail::second_differences(mags, means));
  }
  std::sort(boot.begin(), boot.end());
  v.ci_low = detail::percentile_sorted(boot, 0.025);
  v.ci_high = detail::percentile_sorted(boot, 0.975);

  if (v.ci_low > 0.0) {
    v.label = ConvexityLabel::Antifragile;
  } else if (v.ci_high < 0.0) {
    v.label = ConvexityLabel::Fragile;
  } else {
    v.label = ConvexityLabel::Robust;
  }
  return v;
}

}  // namespace corridor
