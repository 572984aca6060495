#pragma once

#include "isvd/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace isvd {

/// Name recorded in run reports so golden values can be tied to the generator.
inline constexpr std::string_view kGeneratorName = "mt19937_64/box-muller/v1";

/// Derives an independent seed for a labeled substream ("svd", "negatives", ...)
/// from one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Deterministic random source. Every distribution is implemented here rather
/// than through <random> distributions, whose outputs differ between standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

}  // namespace isvd
