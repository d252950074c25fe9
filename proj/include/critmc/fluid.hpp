#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critmc/ode.hpp"
#include "critmc/rules.hpp"

namespace critmc {

/// Fractions vectors are laid out as (x_1, ..., x_K, x_large).

/// Immigration, attachment and edge-formation rates of the large-component
/// subgraph, together with their moment sums.
struct RateValues {
  std::vector<double> a;       // a_j: rate (per n) that a size-(K+j) component immigrates
  std::vector<double> c;       // c_i: attachment rate of size-i components, per unit of target size
  double b = 0.0;              // large-large merge rate, per product of sizes over n
  std::array<double, 4> A{};   // A_l = Σ_j (K+j)^l a_j, l = 1..3 (index 0 unused)
  std::array<double, 4> C{};   // C_l = Σ_i i^l c_i
};

struct RateEvaluation {
  std::vector<double> drift;  // dx_i/dt for every type
  RateValues rates;
};

class FluidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fluid drift and rates at fractions x. Throws std::invalid_argument when x
/// has negative entries or does not sum to 1 (within `slack`).
///
/// With p(j) = x_j and h(u,v) the conditional probability that the added
/// edge joins two given vertices of types u, v,
///   h(u,v) = Σ_{j3,j4} p(j3)p(j4)·1{(u,v,j3,j4)∈F} + Σ_{j1,j2} p(j1)p(j2)·1{(j1,j2,u,v)∉F},
/// the ordered edge-type weight is w(u,v) = p(u)p(v)h(u,v) and
///   b = h(large,large),  c_i = x_i (h(i,large) + h(large,i)) / 2,
///   a_j = ½ Σ_{u+v=K+j} w(u,v),  dx_i/dt = ½ Σ_{u,v} w(u,v) ΔX_i(u,v).
/// Edges inside a single small component are O(1/n) and dropped.
RateEvaluation rate_functions(const BoundedSizeRule& rule, std::span<const double> x,
                              double slack = 1e-6);

/// Drifts of (s_{2,large}, s_{3,large}).
std::pair<double, double> susceptibility_drifts(const RateValues& rv, std::span<const double> x,
                                                double s2w, double s3w);

/// Drifts of y = 1/s_{2,large} and z = y^3 s_{3,large}; polynomial in y.
std::pair<double, double> yz_drifts(const RateValues& rv, std::span<const double> x, double y,
                                    double z);

struct CriticalConstants {
  double t_c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double b_tc = 0.0;
  std::string rule_fingerprint;
  double tol = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double switch_time = 0.0;  // start of the (y, z) representation
};

/// Dense solution of the fluid system on [0, t_c].
class FluidTrajectory {
 public:
  FluidTrajectory() = default;
  FluidTrajectory(std::uint32_t bound, std::vector<ode::Node> early, std::vector<ode::Node> late);

  std::uint32_t bound() const noexcept { return bound_; }
  double end_time() const noexcept { return late_.empty() ? 0.0 : late_.back().t; }
  double switch_time() const noexcept { return late_.empty() ? 0.0 : late_.front().t; }

  std::vector<double> x(double t) const;
  double s2_large(double t) const;
  double s3_large(double t) const;
  /// s_k = s_{k,large} + Σ_i i^{k-1} x_i
  double s2(double t) const;
  double s3(double t) const;
  double y(double t) const { return 1.0 / s2_large(t); }
  double z(double t) const;

  /// Every accepted node time, ascending.
  std::vector<double> node_times() const;

 private:
  // early: (x, s2w, s3w) on [0, switch]; late: (x, y, z) on [switch, t_c].
  std::vector<double> state(double t, bool& late) const;
  std::uint32_t bound_ = 0;
  std::vector<ode::Node> early_;
  std::vector<ode::Node> late_;
};

/// Integrates the fluid limit from x(0) = (1, 0, ..., 0) up to the blow-up
/// time t_c where y reaches 0. tol ∈ (0, 1e-3] is the step tolerance and the
/// bound on the root bracket.
std::pair<FluidTrajectory, CriticalConstants> integrate(const BoundedSizeRule& rule, double tol);

/// Fractions x(t) alone. Their system is closed and stays bounded, so any
/// t ≥ 0 is allowed, including t > t_c.
std::vector<double> fractions_at(const BoundedSizeRule& rule, double t, double tol);

}  // namespace critmc
