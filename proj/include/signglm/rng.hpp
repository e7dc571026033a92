#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

// Reproducible randomness. The generator is std::mt19937_64 (the 64-bit
// Mersenne Twister, whose output stream is pinned by the C++ standard) and
// every transform below is spelled out explicitly instead of delegating to
// unspecified std::*_distribution implementations, so a fixed seed yields
// the same draws everywhere.

namespace signglm {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64_mix(std::uint64_t x);

// Seed-tree derivation: fold the parts into one 64-bit seed, one splitmix64
// round per part. Used as mix_seed({base, cell, rep, purpose, attempt}).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // open interval (0,1): ((x >> 11) + 0.5) * 2^-53
  double uniform01();

  // standard normal via Wichura's AS241 inverse CDF applied to uniform01()
  double normal();

  // standard Laplace (density e^{-|z|}/2) via inverse CDF
  double laplace();

  // uniform on {0, ..., bound-1} by rejection (no modulo bias)
  std::uint64_t below(std::uint64_t bound);

  // s distinct indices from {0, ..., p-1} (partial Fisher-Yates), sorted
  std::vector<std::size_t> sample_without_replacement(std::size_t p, std::size_t s);

  // in-place Fisher-Yates
  void shuffle(std::vector<std::size_t>& v);

 private:
  std::mt19937_64 gen_;
};

// AS241 PPND16: quantile of the standard normal, |error| ~ 1e-16 relative.
double inverse_normal_cdf(double p);

}  // namespace signglm
