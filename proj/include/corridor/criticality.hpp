#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "corridor/agent.hpp"
#include "corridor/detail/fft.hpp"
#include "corridor/rng.hpp"

// Offline criticality diagnostics: spectral-slope estimation by averaged
// periodogram and avalanche statistics with a continuous power-law
// maximum-likelihood fit plus Kolmogorov-Smirnov distance.

namespace corridor {

struct SpectrumEstimate {
  std::vector<double> frequencies;  // cycles per step, ascending, positive
  std::vector<double> power;
  double beta_hat = 0.0;  // power ~ f^(-beta)
  double fit_low = 0.0;
  double fit_high = 0.0;
  double r_squared = 0.0;
  int segments = 0;
};

/// Averaged-periodogram spectrum with a log-log slope fit. Segments are
/// mean-removed and Hann-tapered. The default fit range drops the two lowest
/// positive-frequency bins and everything above a quarter of the sampling
/// rate; pass fit_low/fit_high to override.
inline SpectrumEstimate estimate_spectrum(const std::vector<double>& series,
                                          std::size_t segment_length, double overlap_fraction,
                                          double fit_low = 0.0, double fit_high = 0.0) {
  if (!detail::is_power_of_two(segment_length))
    throw std::invalid_argument("estimate_spectrum: segment_length must be a power of two");
  if (series.size() < 2 * segment_length)
    throw std::invalid_argument("estimate_spectrum: series too short: need at least " +
                                std::to_string(2 * segment_length) + " samples, got " +
                                std::to_string(series.size()));
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw std::invalid_argument("estimate_spectrum: overlap_fraction must be in [0, 1)");
  for (double v : series) {
    if (!std::isfinite(v)) throw std::invalid_argument("estimate_spectrum: non-finite sample");
  }

  const std::size_t L = segment_length;
  std::size_t hop = static_cast<std::size_t>(static_cast<double>(L) * (1.0 - overlap_fraction));
  if (hop == 0) hop = 1;

  std::vector<double> window(L);
  double window_ss = 0.0;
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(L - 1)));
    window_ss += window[i] * window[i];
  }

  const std::size_t n_bins = L / 2;  // positive frequencies k = 1 .. L/2
  std::vector<double> psd(n_bins, 0.0);
  std::vector<std::complex<double>> buf(L);
  int segments = 0;
  for (std::size_t start = 0; start + L <= series.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < L; ++i) mean += series[start + i];
    mean /= static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i) buf[i] = {(series[start + i] - mean) * window[i], 0.0};
    detail::fft_radix2(buf, false);
    for (std::size_t k = 1; k <= n_bins; ++k) {
      const double mag = std::norm(buf[k]);
      psd[k - 1] += (k == n_bins ? 1.0 : 2.0) * mag / window_ss;  // one-sided, fs = 1
    }
    ++segments;
  }

  SpectrumEstimate est;
  est.segments = segments;
  est.frequencies.resize(n_bins);
  est.power.resize(n_bins);
  for (std::size_t k = 1; k <= n_bins; ++k) {
    est.frequencies[k - 1] = static_cast<double>(k) / static_cast<double>(L);
    est.power[k - 1] = psd[k - 1] / static_cast<double>(segments);
  }

  est.fit_low = fit_low > 0.0 ? fit_low : 3.0 / static_cast<double>(L);
  est.fit_high = fit_high > 0.0 ? fit_high : 0.25;

  // least squares on (ln f, ln P) inside the fit range
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double f = est.frequencies[i];
    if (f < est.fit_low || f > est.fit_high) continue;
    if (!(est.power[i] > 0.0)) continue;
    const double x = std::log(f);
    const double y = std::log(est.power[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < 3) throw std::runtime_error("estimate_spectrum: fewer than 3 usable bins in fit range");
  const double nn = static_cast<double>(n);
  const double cov = sxy - sx * sy / nn;
  const double var_x = sxx - sx * sx / nn;
  const double var_y = syy - sy * sy / nn;
  const double slope = cov / var_x;
  est.beta_hat = -slope;
  est.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
  return est;
}

/// Gaussian spectral synthesis of power-law noise: complex coefficients
/// scaled by f^(-beta/2), Hermitian-symmetrized, inverse-transformed, and
/// normalized to unit sample variance. n must be a power of two.
inline std::vector<double> synthesize_power_law_noise(std::size_t n, double beta, Rng& rng) {
  if (!detail::is_power_of_two(n) || n < 8)
    throw std::invalid_argument("synthesize_power_law_noise: n must be a power of two >= 8");
  std::vector<std::complex<double>> spec(n, {0.0, 0.0});
  const double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    const double amp = std::pow(f, -beta / 2.0);
    const std::complex<double> z(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
    spec[k] = amp * z;
    spec[n - k] = std::conj(spec[k]);
  }
  spec[n / 2] = std::pow(0.5, -beta / 2.0) * rng.normal();
  detail::fft_radix2(spec, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : out) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd > 0.0) {
    for (double& v : out) v = (v - mean) / sd;
  }
  return out;
}

struct AvalancheSet {
  std::vector<double> sizes;           // sum of |value| - threshold over each run
  std::vector<std::int64_t> durations; // run lengths
  double threshold = 0.0;
  double s_min = 0.0;                  // fit cutoff, filled by the report
};

/// Maximal runs of consecutive samples with |value| > threshold. Size is the
/// above-threshold mass, duration the run length. Runs touching either series
/// boundary are discarded (their true extent is censored).
inline AvalancheSet extract_avalanches(const std::vector<double>& series, double threshold) {
  for (double v : series) {
    if (!std::isfinite(v)) throw std::invalid_argument("extract_avalanches: non-finite sample");
  }
  AvalancheSet out;
  out.threshold = threshold;
  const std::size_t n = series.size();
  std::size_t i = 0;
  while (i < n) {
    if (std::abs(series[i]) > threshold) {
      const std::size_t start = i;
      double size = 0.0;
      while (i < n && std::abs(series[i]) > threshold) {
        size += std::abs(series[i]) - threshold;
        ++i;
      }
      if (start > 0 && i < n) {  // interior run only
        out.sizes.push_back(size);
        out.durations.push_back(static_cast<std::int64_t>(i - start));
      }
    } else {
      ++i;
    }
  }
  return out;
}

struct PowerLawFit {
  double tau_hat = 0.0;
  double s_min = 0.0;
  int n_tail = 0;
  double ks_distance = 0.0;
  double std_error = 0.0;
};

/// Continuous power-law tail fit: tau_hat = 1 + n / sum(ln(s_i/s_min)) over
/// the samples >= s_min, with std_error (tau_hat-1)/sqrt(n) and the KS
/// distance between the empirical tail and the fitted distribution.
inline PowerLawFit fit_power_law(const std::vector<double>& samples, double s_min) {
  if (!(s_min > 0.0)) throw std::invalid_argument("fit_power_law: s_min must be > 0");
  std::vector<double> tail;
  for (double s : samples) {
    if (!std::isfinite(s) || s <= 0.0)
      throw std::invalid_argument("fit_power_law: samples must be finite and > 0");
    if (s >= s_min) tail.push_back(s);
  }
  const std::size_t n = tail.size();
  if (n < 50)
    throw std::invalid_argument("fit_power_law: insufficient tail: need >= 50 samples >= s_min, have " +
                                std::to_string(n));
  std::sort(tail.begin(), tail.end());
  if (tail.front() == tail.back())
    throw std::invalid_argument("fit_power_law: degenerate tail (zero log-spread)");

  double log_sum = 0.0;
  for (double s : tail) log_sum += std::log(s / s_min);
  PowerLawFit fit;
  fit.s_min = s_min;
  fit.n_tail = static_cast<int>(n);
  fit.tau_hat = 1.0 + static_cast<double>(n) / log_sum;
  fit.std_error = (fit.tau_hat - 1.0) / std::sqrt(static_cast<double>(n));

  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double model = 1.0 - std::pow(tail[i] / s_min, 1.0 - fit.tau_hat);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, std::max(hi - model, model - lo));
  }
  fit.ks_distance = d;
  return fit;
}

/// Slow mode: scan candidate cutoffs (unique tail values, capped at 64
/// evenly spread candidates) and keep the fit with the smallest KS distance.
inline PowerLawFit fit_power_law_scan(const std::vector<double>& samples) {
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty()) throw std::invalid_argument("fit_power_law_scan: no samples");
  const std::size_t max_candidates = 64;
  const std::size_t stride = std::max<std::size_t>(1, sorted.size() / max_candidates);
  bool found = false;
  PowerLawFit best;
  for (std::size_t i = 0; i < sorted.size(); i += stride) {
    if (!(sorted[i] > 0.0)) continue;
    try {
      const PowerLawFit f = fit_power_law(samples, sorted[i]);
      if (!found || f.ks_distance < best.ks_distance) {
        best = f;
        found = true;
      }
    } catch (const std::invalid_argument&) {
      break;  // tail too small from here on
    }
  }
  if (!found) throw std::invalid_argument("fit_power_law_scan: no cutoff leaves a fittable tail");
  return best;
}

struct CriticalityConfig {
  std::size_t segment_length = 4096;
  double overlap_fraction = 0.5;
  double fit_low = 0.0;    // 0 = default range
  double fit_high = 0.0;
  double threshold = 0.0;  // <= 0: median(|eps|) + one standard deviation
  double s_min = 0.0;      // <= 0: median avalanche size
  bool ks_scan = false;    // scan cutoffs for minimal KS instead of fixed s_min
};

struct CriticalityReport {
  SpectrumEstimate spectrum;
  AvalancheSet avalanches;
  bool power_law_available = false;
  std::string power_law_note;
  PowerLawFit power_law;
  CriticalityConfig config;  // echoed parameters (threshold/s_min resolved)
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

}  // namespace detail

/// Bundles both markers for one signal: its spectrum (mandatory; short
/// series fail fast) and a power-law fit of its avalanche sizes (marked
/// unavailable when the tail is too small).
inline CriticalityReport criticality_report(const std::vector<double>& eps,
                                            const CriticalityConfig& cfg) {
  CriticalityReport rep;
  rep.config = cfg;
  rep.spectrum = estimate_spectrum(eps, cfg.segment_length, cfg.overlap_fraction, cfg.fit_low,
                                   cfg.fit_high);

  double threshold = cfg.threshold;
  if (threshold <= 0.0) {
    std::vector<double> abs_eps(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) abs_eps[i] = std::abs(eps[i]);
    threshold = detail::median_of(abs_eps) + std::sqrt(sample_variance(abs_eps));
  }
  rep.config.threshold = threshold;
  rep.avalanches = extract_avalanches(eps, threshold);

  try {
    if (cfg.ks_scan) {
      rep.power_law = fit_power_law_scan(rep.avalanches.sizes);
    } else {
      double s_min = cfg.s_min;
      if (s_min <= 0.0) s_min = detail::median_of(rep.avalanches.sizes);
      rep.power_law = fit_power_law(rep.avalanches.sizes, s_min);
    }
    rep.power_law_available = true;
    rep.config.s_min = rep.power_law.s_min;
    rep.avalanches.s_min = rep.power_law.s_min;
  } catch (const std::invalid_argument& e) {
    rep.power_law_available = false;
    rep.power_law_note = e.what();
  }
  return rep;
}

/// Report over the prediction-error series of an episode trace.
inline CriticalityReport criticality_report(const std::vector<StepRecord>& trace,
                                            const CriticalityConfig& cfg) {
  std::vector<double> eps;
  eps.reserve(trace.size());
  for (const auto& r : trace) eps.push_back(r.epsilon);
  return criticality_report(eps, cfg);
}

}  // namespace corridor
