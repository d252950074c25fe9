#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "critmc/fluid.hpp"
#include "critmc/graph_engine.hpp"
#include "critmc/parallel.hpp"
#include "critmc/rules.hpp"
#include "critmc/stats.hpp"

namespace critmc {

/// One ranked component of a rescaled window snapshot or of a limit sample
/// (size ↔ excursion length, surplus ↔ mark count).
struct ScaledRecord {
  std::uint64_t replicate = 0;
  double lambda = 0.0;
  std::uint32_t rank = 1;
  double size = 0.0;
  std::uint64_t surplus = 0;
  double weighted_sum = 0.0;  // Σ_i size_i · surplus_i over the whole snapshot
  double area = std::numeric_limits<double>::quiet_NaN();  // limit samples only
};

/// Raw snapshot row: unscaled component sizes at a fixed time.
struct SnapshotRecord {
  std::uint64_t replicate = 0;
  double t = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::uint32_t rank = 1;
  std::uint64_t size = 0;
  std::uint64_t surplus = 0;
  double s2bar = 0.0;
  double s3bar = 0.0;
};

struct WindowConfig {
  BoundedSizeRule rule;
  std::uint32_t n = 0;
  double gamma = 0.18;
  std::vector<double> lambdas;
  std::size_t replicates = 1;
  std::size_t top_k = 1;
  std::uint64_t seed = 0;
  CriticalConstants constants;

  /// Throws std::invalid_argument on a bad field, including a window time
  /// t_c + αβ^{2/3}λn^{-1/3} that falls below 0.
  void validate() const;
};

/// One BSR trajectory per replicate, snapshotted at every window time in
/// increasing λ order. Records are ordered by replicate, λ, rank.
std::vector<ScaledRecord> run_window(const WindowConfig& cfg,
                                     Execution mode = Execution::parallel);

/// Raw snapshots at the given (sorted) times. `constants` fills the λ column
/// when given.
std::vector<SnapshotRecord> run_snapshots(const BoundedSizeRule& rule, std::uint32_t n,
                                          const std::vector<double>& times,
                                          std::size_t replicates, std::size_t top_k,
                                          std::uint64_t seed,
                                          const CriticalConstants* constants = nullptr,
                                          Execution mode = Execution::parallel);

struct LimitConfig {
  std::vector<double> lambdas;
  std::size_t replicates = 1;
  double step = 1e-3;
  double horizon = 15.0;
  std::size_t top_k = 1;
  std::uint64_t seed = 0;
};

/// Independent limit samples per (λ, replicate) in the window schema. A
/// sample without excursions yields one rank-1 record of size 0.
std::vector<ScaledRecord> run_limit_reference(const LimitConfig& cfg,
                                              Execution mode = Execution::parallel);

class ComparisonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LambdaComparison {
  double lambda = 0.0;
  Moments empirical_c1, reference_c1;
  Moments empirical_y1, reference_y1;
  Moments empirical_weighted, reference_weighted;
  KsResult ks;           // on C̄_1
  double y1_z = 0.0;     // |Δ mean Ȳ_1| in units of its standard error
};

struct ComparisonReport {
  std::vector<LambdaComparison> rows;
};

/// Per-λ comparison of rank-1 statistics. Throws ComparisonError when the λ
/// grids differ or a side has fewer than 30 samples at some λ.
ComparisonReport compare(const std::vector<ScaledRecord>& empirical,
                         const std::vector<ScaledRecord>& reference);

/// t_c − n^{−γ}.
double subcritical_end(const CriticalConstants& constants, std::uint32_t n, double gamma);

/// `count` equally spaced points from 0 to t_end inclusive.
std::vector<double> uniform_checkpoints(double t_end, std::size_t count);

/// Points from 0 to t_end whose distance to t_end shrinks geometrically from
/// t_end down to 1e-3·t_end, then t_end itself.
std::vector<double> susceptibility_grid(double t_end, std::size_t count = 200);

struct SubcriticalReport {
  std::vector<double> times;
  std::vector<double> ratios;  // I(t)(t_c − t)²/(log n)⁴
  double max_ratio = 0.0;
};

/// Throws std::invalid_argument if a checkpoint lies outside [0, t_c − n^{−γ}].
SubcriticalReport check_subcritical(const BoundedSizeRule& rule, std::uint32_t n, double gamma,
                                    const std::vector<double>& checkpoints, std::uint64_t seed,
                                    const CriticalConstants& constants);

struct SusceptibilityReport {
  std::vector<double> grid;
  double sup_inv_s2 = 0.0;    // sup |n^{1/3}/s̄_2 − n^{1/3}/s_2|
  double sup_s3_ratio = 0.0;  // sup |s̄_3/s̄_2³ − s_3/s_2³|
};

/// Same domain check as check_subcritical.
SusceptibilityReport check_susceptibility(const BoundedSizeRule& rule, std::uint32_t n,
                                          double gamma, const std::vector<double>& grid,
                                          std::uint64_t seed, const FluidTrajectory& fluid,
                                          const CriticalConstants& constants);

struct DriftEstimate {
  double t = 0.0;
  std::vector<double> predicted;  // (x(t+dt) − x(t))/dt from the fluid limit
  std::vector<double> mean;       // Monte Carlo (x̄(t+dt) − x̄(t))/dt
  std::vector<double> sem;
};

/// Finite-difference drift of the type fractions at each time, over
/// independent replicates of size n. Times must be sorted with gaps ≥ dt.
std::vector<DriftEstimate> estimate_drift(const BoundedSizeRule& rule, std::uint32_t n,
                                          const std::vector<double>& times, double dt,
                                          std::size_t replicates, std::uint64_t seed,
                                          Execution mode = Execution::parallel);

}  // namespace critmc
