#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace infoteacher::rng {

/// splitmix64 finalizer; good avalanche, used to derive substream seeds.
constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hash-combine a seed with stream tags (e.g. derive(seed, m, trial)).
/// Every independent sampling stream in the project gets its seed this way,
/// so results do not depend on evaluation order or scheduling.
template <typename... Tags>
constexpr std::uint64_t derive(std::uint64_t seed, Tags... tags) {
  std::uint64_t h = mix(seed);
  ((h = mix(h ^ static_cast<std::uint64_t>(tags))), ...);
  return h;
}

/// Inverse standard normal CDF (Wichura's AS 241, PPND16).
/// Relative error below 1e-15 over (0, 1).
double inv_normal_cdf(double p);

/// Deterministic generator. std::mt19937_64 output is pinned by the
/// standard; all value transforms are hand-rolled here because the
/// stdlib distributions are implementation-defined.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double canonical() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe as inverse-CDF input.
  double open01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return mean + stddev * inv_normal_cdf(open01());
  }

  /// Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates; deterministic for a given engine state.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace infoteacher::rng
