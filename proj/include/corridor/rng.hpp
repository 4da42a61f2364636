#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

// Self-contained seeded randomness with counter-based stream splitting.
// Every random consumer owns its own Rng seeded through derive_stream(), so
// results never depend on scheduling or evaluation order.

namespace corridor {

namespace detail {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state;
  constexpr std::uint64_t next() {
    state += kGamma;
    return mix64(state);
  }
};

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Derives an independent stream seed from a master seed and a path of
/// integers (component tag, then indices such as magnitude and trial).
/// Distinct paths give unrelated streams; the derivation is a pure counter
/// scheme, so parallel workers can seed streams in any order.
inline std::uint64_t derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix64(master ^ detail::kGamma);
  for (std::uint64_t w : path) {
    h = detail::mix64(h ^ detail::mix64(w + detail::kGamma));
  }
  return h;
}

// Stream tags used across the library; documented in the run manifest docs.
namespace stream_tag {
constexpr std::uint64_t kEnvironment = 1;  // observation stream of one episode
constexpr std::uint64_t kSweep = 2;        // per (magnitude, trial) episode streams
constexpr std::uint64_t kBootstrap = 3;    // convexity bootstrap resampling
constexpr std::uint64_t kSynthesis = 4;    // synthetic noise generators
}  // namespace stream_tag

/// xoshiro256++ generator with explicit normal/uniform draws, so the byte
/// stream of every run is fixed by the seed alone (no reliance on the
/// standard library's unspecified distribution algorithms).
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    detail::SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; never zero, safe under log.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the paired variate is cached so draws
  /// consume input words at a fixed, seed-determined rate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace corridor
