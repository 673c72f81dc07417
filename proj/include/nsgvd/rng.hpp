#pragma once

// Seedable, splittable random source.
//
// Stream discipline: every consumer derives its own substream from the global
// seed with `Rng::derive(seed, stream_name, index)`. A stream name identifies
// the purpose ("synth.video", "train.batch", ...) and the index identifies the
// item (video number, trial block, ...). Derivation hashes (seed, name, index)
// with splitmix64, so results never depend on scheduling or thread count.
//
// Uniform and normal variates are produced by code in this file rather than by
// <random> distributions, whose output differs between standard libraries.

#include <cstdint>
#include <random>
#include <string_view>

namespace nsgvd {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng derive(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nsgvd
