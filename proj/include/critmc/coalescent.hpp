#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "critmc/random.hpp"

namespace critmc {

struct Block {
  double mass = 0.0;
  std::uint64_t surplus = 0;
  bool operator==(const Block&) const = default;
};

/// Finite point of the augmented state space: blocks ordered by mass
/// (descending), equal masses by surplus (descending), then insertion order.
class AugmentedState {
 public:
  AugmentedState() = default;
  /// Throws std::invalid_argument on a nonpositive or non-finite mass.
  explicit AugmentedState(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }

  double total_mass() const noexcept;
  double sum_squares() const noexcept;       // Σ mass²
  double mass_surplus() const noexcept;      // Σ mass·surplus
  std::uint64_t total_surplus() const noexcept;

  bool operator==(const AugmentedState&) const = default;

 private:
  std::vector<Block> blocks_;
};

/// ℓ² distance of the masses plus ℓ¹ distance of mass·surplus, padding the
/// shorter state with empty blocks.
double d_U(const AugmentedState& a, const AugmentedState& b);

/// Markov dynamics: blocks i ≠ j merge at rate x_i x_j (surpluses add);
/// block i gains one surplus at rate x_i²/2.
AugmentedState amc_run(const AugmentedState& z, double duration, Rng& rng);
AugmentedState amc_run(const AugmentedState& z, double duration, std::uint64_t seed);

/// Poisson graph on the blocks: Poisson(t x_i x_j) edges between i < j and
/// Poisson(t x_i²/2) self-loops at i; components add masses, initial
/// surpluses, and their cycle count.
AugmentedState graphical_construction(const AugmentedState& z, double t, Rng& rng);
AugmentedState graphical_construction(const AugmentedState& z, double t, std::uint64_t seed);

/// Reads `mass,surplus` lines (blank lines and `#` comments skipped).
AugmentedState parse_state_csv(std::string_view text);

}  // namespace critmc
