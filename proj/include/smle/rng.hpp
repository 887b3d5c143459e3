#pragma once

#include <cstdint>
#include <random>

namespace smle {

// Deterministic RNG used everywhere randomness is needed.
//
// The integer stream is std::mt19937_64 (pinned by the standard), and all
// transforms to doubles are implemented here rather than via std::*_distribution
// (whose output is implementation-defined). Given the same build, a seed fully
// determines every generated dataset and replicate.
//
// Stream splitting: split(i) derives an independent child generator from the
// *construction* seed only (not from how many draws were consumed):
//   child_seed = splitmix64(seed + (i+1) * 0x9E3779B97F4A7C15)
// Conventions used by this project:
//   gen_data:       split(0) -> truth (positions/effects), split(1) -> features,
//                   split(2) -> response
//   run_experiment: master.split(cell_index).split(replicate) -> dataset seed
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t stream) const;

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos();
  // Standard normal (Box-Muller; pairs are cached).
  double normal();
  // Uniform integer in {0,...,n-1}, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);
  bool bernoulli(double p);
  // Poisson draw; Knuth's product method for small means, Hoermann's PTRS
  // transformed rejection for lambda >= 10. Returned as double (counts can
  // exceed the int range for extreme means).
  double poisson(double lambda);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Inverse standard-normal CDF (Acklam's rational approximation plus one Halley
// refinement; ~1e-15 relative accuracy). Used for quantile binning.
double inverse_normal_cdf(double p);

}  // namespace smle
