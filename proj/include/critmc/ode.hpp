#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace critmc::ode {

using State = std::vector<double>;
using Rhs = std::function<void(double t, const State& u, State& du)>;

/// Accepted solution point with its derivative (for Hermite dense output).
struct Node {
  double t = 0.0;
  State u;
  State du;
};

/// Cubic Hermite interpolant between two nodes; exact at both ends.
State hermite(const Node& a, const Node& b, double t);
double hermite_component(const Node& a, const Node& b, double t, std::size_t i);

/// Dormand–Prince 5(4) embedded pair with FSAL and max-norm step control.
class DormandPrince {
 public:
  DormandPrince(Rhs f, double rtol, double atol, double h_max);

  struct Trial {
    Node next;
    double error = 0.0;  // scaled max-norm, accept when ≤ 1
  };

  /// One step of size h from `from` without step-size control.
  Trial attempt(const Node& from, double h) const;

  /// Node at (t, u) with its derivative evaluated.
  Node make_node(double t, State u) const;

  /// Takes one accepted adaptive step from `from`, updating the step size.
  Node advance(const Node& from);

  double step_size() const noexcept { return h_; }
  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t rejected() const noexcept { return rejected_; }

 private:
  Rhs f_;
  double rtol_;
  double atol_;
  double h_max_;
  double h_;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace critmc::ode
