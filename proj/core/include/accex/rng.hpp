#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace accex {

//! SplitMix64 finalizer (Steele, Lea & Flood; the java.util.SplittableRandom
//! mixer). Used both as the generator step and to hash stream indices.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Deterministic 64-bit generator with derivable substreams.
//!
//! All randomness in the library flows through this class so that seeded
//! results are bit-reproducible across platforms and compilers; the standard
//! library distributions are avoided because their output is
//! implementation-defined. Substreams for (seed, index...) tuples are derived
//! by chaining the SplitMix64 finalizer over the indices.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 substream(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = splitmix64_mix(seed);
    for (std::uint64_t id : ids) h = splitmix64_mix(h ^ id);
    return SplitMix64(h);
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  //! Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  //! Uniform integer in [0, n). Multiply-shift reduction; the bias of at
  //! most n / 2^64 is irrelevant at the sample sizes used here and keeps the
  //! draw count fixed, which substream reproducibility relies on.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  //! Standard normal via Box-Muller; the second variate of each pair is
  //! cached, so a stream yields a fixed sequence independent of call sites.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the logarithm is finite.
    double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace accex
