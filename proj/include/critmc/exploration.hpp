#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critmc/coalescent.hpp"
#include "critmc/random.hpp"

namespace critmc {

/// Piecewise-linear path with jumps. Each breakpoint stores the left limit
/// (`before`) and the value (`after`); between breakpoints the path is linear
/// from after[k] to before[k+1]. Evaluation is right-continuous.
class WalkPath {
 public:
  /// Appends a breakpoint; times must be strictly increasing.
  void append(double t, double before, double after);
  void append(double t, double value) { append(t, value, value); }

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& before() const noexcept { return before_; }
  const std::vector<double>& after() const noexcept { return after_; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  /// Right-continuous value; clamps to the first/last breakpoint outside the range.
  double value_at(double t) const;
  /// Left limit at t.
  double left_limit(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> before_;
  std::vector<double> after_;
};

/// Subtracts the running minimum (left limits included). A breakpoint is
/// inserted wherever a segment crosses below the previous minimum, so the
/// result is exact for piecewise-linear input.
WalkPath reflect(const WalkPath& walk);

struct ExcursionRecord {
  double start = 0.0;
  double end = 0.0;
  double length = 0.0;
  double area = 0.0;
  std::uint64_t marks = 0;
};

/// Maximal intervals where a nonnegative path is positive, with their areas
/// and the number of (sorted) marks inside. Sorted by length, then marks,
/// descending. An excursion still open at the end of the path is dropped.
std::vector<ExcursionRecord> extract_excursions(const WalkPath& reflected,
                                                const std::vector<double>& marks);

/// Length of an excursion still open at the end of the path (0 if none).
double open_tail_length(const WalkPath& reflected);

struct BfsWalk {
  AugmentedState components;  // mass = volume, surplus = stage-II edges
  std::vector<Block> order;   // the same components in exploration order
  /// Z: drift −1 on every vertex interval plus the masses of new arrivals.
  WalkPath walk;
  /// Z plus the masses of every root started so far, i.e. the mass waiting
  /// in the queue. Its excursions are exactly the components.
  WalkPath exploration;
  std::vector<double> marks;  // sorted walk times of the stage-II edges
  /// Realized mark intensity r(t), a right-continuous step function.
  std::vector<double> rate_times;
  std::vector<double> rate_values;
  double total_length = 0.0;
};

/// Two-stage breadth-first construction on vertices with the given masses:
/// roots in size-biased order, arrivals from Poisson processes of intensity
/// q·x_j, and surplus edges (repeat arrivals, self-loops at rate q·x_i/2,
/// edges to queued vertices) placed as marks at l_{i-1} + τ.
BfsWalk bfs_walk_build(const std::vector<double>& masses, double q, Rng& rng);
BfsWalk bfs_walk_build(const std::vector<double>& masses, double q, std::uint64_t seed);

/// sup_t |r(t) − q (Z(t) − min_{u≤t} Z(u))|, taken over both one-sided
/// limits at every breakpoint of either function.
double mark_rate_gap(const BfsWalk& w, double q);

/// Empty when the reflected exploration walk reproduces the components
/// (lengths to `tol`, marks exactly); otherwise a description of the mismatch.
std::optional<std::string> exploration_mismatch(const BfsWalk& w, double tol = 1e-9);

struct WalkDiagnostics {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double x_star = 0.0;
  double q_minus_inv_s2 = 0.0;
  double ratio_s3_s2cubed = 0.0;
  double x_star_over_s2 = 0.0;
  double precondition_value = 0.0;  // s1 · (x*/s2)^ς
  double rate_gap = 0.0;            // mark_rate_gap of one realization
  bool r_bound_ok = false;          // rate_gap ≤ (3/2) q x*
};

WalkDiagnostics walk_diagnostics(const std::vector<double>& masses, double q, double varsigma,
                                 std::uint64_t seed);

struct LimitSample {
  AugmentedState state;                    // (length, marks) per excursion
  std::vector<ExcursionRecord> excursions;  // same order as state
  double tail_length = 0.0;                // excursion cut off by the horizon
};

/// One draw of the marked excursions of W(t) + λt − t²/2 reflected, with W
/// a Brownian motion sampled on a grid of the given step. `noise` scales W
/// (1 for the real process, 0 for the deterministic parabola). Excursions
/// shorter than 2·step are dropped. Throws std::invalid_argument unless
/// step ∈ (0, 1e-2] and horizon ≥ max(10, 4|λ|).
LimitSample sample_limit(double lambda, double step, double horizon, Rng& rng,
                         double noise = 1.0);
LimitSample sample_limit(double lambda, double step, double horizon, std::uint64_t seed,
                         double noise = 1.0);

struct WalkInstance {
  std::vector<double> masses;
  double q = 1.0;
};

/// Random instance for the consistency fuzz: 1 to 50 masses, uniform on
/// (0, 1] or Pareto-like, and q uniform on [0.1, 20].
WalkInstance random_walk_instance(Rng& rng);

struct WalkCheckFailure {
  std::size_t instance = 0;
  WalkInstance input;
  std::uint64_t build_seed = 0;
  std::string reason;
};

struct WalkCheckReport {
  std::size_t instances = 0;
  std::size_t consistency_failures = 0;
  std::size_t bound_violations = 0;
  double worst_gap_ratio = 0.0;  // max of rate_gap / ((3/2) q x*)
  std::optional<WalkCheckFailure> first_failure;
  bool ok() const { return consistency_failures == 0 && bound_violations == 0; }
};

/// Exploration consistency and the mark-rate bound over random instances;
/// instance i is drawn from derive_seed(seed, "walk-check", i).
WalkCheckReport run_walk_check(std::size_t instances, std::uint64_t seed);

}  // namespace critmc
