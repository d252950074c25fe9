#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace critmc {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Stable keyed seed derivation used for every random stream in the tool.
///
///   h = splitmix64(master ^ fnv1a64(label))
///   seed = splitmix64(h + 0x9e3779b97f4a7c15 * (index + 1))
///
/// Changing this function changes every output file, so it is frozen.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) noexcept;

/// Random source with hand-written variate generators. The standard
/// distributions in <random> are implementation-defined; these are not, so a
/// seed reproduces the same stream on every platform that provides
/// std::mt19937_64 (whose output is fixed by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
  std::uint64_t below(std::uint64_t bound);

  double exponential(double rate);

  /// Standard normal via the Marsaglia polar method (pairs are cached).
  double normal();

  /// Poisson variate. Sequential-search inversion for mean < 10, Hörmann's
  /// PTRS transformed rejection otherwise.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace critmc
