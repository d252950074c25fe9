#include "critmc/fluid.hpp"

#include <algorithm>
#include <cmath>

namespace critmc {

RateEvaluation rate_functions(const BoundedSizeRule& rule, std::span<const double> x,
                              double slack) {
  const std::uint32_t K = rule.bound();
  const std::size_t T = std::size_t{K} + 1;
  if (x.size() != T) throw std::invalid_argument("fractions vector has wrong length");
  double total = 0.0;
  for (double v : x) {
    if (!(v >= -slack)) throw std::invalid_argument("fractions vector has a negative entry");
    total += v;
  }
  if (!(std::fabs(total - 1.0) <= slack))
    throw std::invalid_argument("fractions vector does not sum to 1");

  const std::vector<RuleType> types = all_types(K);
  // first[u][v]: the first pair is (u,v) and the rule picks it.
  // second[u][v]: the second pair is (u,v) and the rule rejects the first.
  std::vector<double> first(T * T, 0.0), second(T * T, 0.0);
  for (std::size_t i0 = 0; i0 < T; ++i0)
    for (std::size_t i1 = 0; i1 < T; ++i1)
      for (std::size_t i2 = 0; i2 < T; ++i2)
        for (std::size_t i3 = 0; i3 < T; ++i3) {
          const bool in_f = rule.contains({types[i0], types[i1], types[i2], types[i3]});
          if (in_f)
            first[i0 * T + i1] += x[i2] * x[i3];
          else
            second[i2 * T + i3] += x[i0] * x[i1];
        }
  auto h = [&](std::size_t u, std::size_t v) { return first[u * T + v] + second[u * T + v]; };

  RateEvaluation out;
  RateValues& rv = out.rates;
  rv.a.assign(K, 0.0);
  rv.c.assign(K, 0.0);
  out.drift.assign(T, 0.0);
  const std::size_t L = K;  // index of the large type
  rv.b = h(L, L);
  for (std::size_t i = 0; i < K; ++i) rv.c[i] = 0.5 * x[i] * (h(i, L) + h(L, i));

  std::vector<double> delta(T);
  for (std::size_t u = 0; u < T; ++u) {
    for (std::size_t v = 0; v < T; ++v) {
      const double w = x[u] * x[v] * h(u, v);
      if (w == 0.0) continue;
      std::fill(delta.begin(), delta.end(), 0.0);
      const double su = static_cast<double>(u + 1);
      const double sv = static_cast<double>(v + 1);
      if (u < L && v < L) {
        delta[u] -= su;
        delta[v] -= sv;
        const std::size_t merged = u + v + 2;
        if (merged <= K) {
          delta[merged - 1] += su + sv;
        } else {
          delta[L] += su + sv;
          rv.a[merged - K - 1] += 0.5 * w;
        }
      } else if (u < L) {
        delta[u] -= su;
        delta[L] += su;
      } else if (v < L) {
        delta[v] -= sv;
        delta[L] += sv;
      }
      for (std::size_t i = 0; i < T; ++i) out.drift[i] += 0.5 * w * delta[i];
    }
  }
  for (int l = 1; l <= 3; ++l) {
    for (std::size_t j = 1; j <= K; ++j) {
      rv.A[l] += std::pow(double(K + j), l) * rv.a[j - 1];
      rv.C[l] += std::pow(double(j), l) * rv.c[j - 1];
    }
  }
  return out;
}

std::pair<double, double> susceptibility_drifts(const RateValues& rv, std::span<const double> x,
                                                double s2w, double s3w) {
  const double xl = x.back();
  const double ds2 = rv.A[2] + 2.0 * rv.C[1] * s2w + xl * rv.C[2] + s2w * s2w * rv.b;
  const double ds3 = rv.A[3] + 3.0 * rv.C[1] * s3w + 3.0 * rv.C[2] * s2w + xl * rv.C[3] +
                     3.0 * rv.b * s2w * s3w;
  return {ds2, ds3};
}

std::pair<double, double> yz_drifts(const RateValues& rv, std::span<const double> x, double y,
                                    double z) {
  const double xl = x.back();
  const double dy = -(rv.A[2] + rv.C[2] * xl) * y * y - 2.0 * rv.C[1] * y - rv.b;
  const double b1 = 3.0 * y * rv.A[2] + 3.0 * y * rv.C[2] * xl + 3.0 * rv.C[1];
  const double b2 = y * y * y * rv.A[3] + 3.0 * y * y * rv.C[2] + y * y * y * rv.C[3] * xl;
  return {dy, -b1 * z + b2};
}

FluidTrajectory::FluidTrajectory(std::uint32_t bound, std::vector<ode::Node> early,
                                 std::vector<ode::Node> late)
    : bound_(bound), early_(std::move(early)), late_(std::move(late)) {}

std::vector<double> FluidTrajectory::state(double t, bool& late) const {
  late = !late_.empty() && t >= late_.front().t;
  const std::vector<ode::Node>& nodes = late ? late_ : early_;
  if (nodes.empty()) throw std::logic_error("empty fluid trajectory");
  if (t <= nodes.front().t) return nodes.front().u;
  if (t >= nodes.back().t) return nodes.back().u;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                             [](double v, const ode::Node& n) { return v < n.t; });
  return ode::hermite(*(it - 1), *it, t);
}

std::vector<double> FluidTrajectory::x(double t) const {
  bool late = false;
  std::vector<double> u = state(t, late);
  u.resize(std::size_t{bound_} + 1);
  return u;
}

double FluidTrajectory::s2_large(double t) const {
  bool late = false;
  const auto u = state(t, late);
  return late ? 1.0 / u[bound_ + 1] : u[bound_ + 1];
}

double FluidTrajectory::s3_large(double t) const {
  bool late = false;
  const auto u = state(t, late);
  if (!late) return u[bound_ + 2];
  const double y = u[bound_ + 1];
  return u[bound_ + 2] / (y * y * y);
}

double FluidTrajectory::z(double t) const {
  bool late = false;
  const auto u = state(t, late);
  if (late) return u[bound_ + 2];
  const double s2 = u[bound_ + 1];
  return u[bound_ + 2] / (s2 * s2 * s2);
}

double FluidTrajectory::s2(double t) const {
  const auto xs = x(t);
  double s = s2_large(t);
  for (std::uint32_t i = 1; i <= bound_; ++i) s += double(i) * xs[i - 1];
  return s;
}

double FluidTrajectory::s3(double t) const {
  const auto xs = x(t);
  double s = s3_large(t);
  for (std::uint32_t i = 1; i <= bound_; ++i) s += double(i) * double(i) * xs[i - 1];
  return s;
}

std::vector<double> FluidTrajectory::node_times() const {
  std::vector<double> out;
  for (const auto& n : early_) out.push_back(n.t);
  for (const auto& n : late_)
    if (out.empty() || n.t > out.back()) out.push_back(n.t);
  return out;
}

namespace {

constexpr double kTimeCap = 100.0;
constexpr double kMaxStep = 0.05;

// Locates where component `i` of the solution crosses `level` inside the
// accepted step (from, to): bisection on the Hermite interpolant, then two
// Newton corrections using exact single steps from `from`.
ode::Node locate_crossing(const ode::DormandPrince& solver, const ode::Node& from,
                          const ode::Node& to, std::size_t i, double level, double tol) {
  double lo = from.t, hi = to.t;
  const bool rising = to.u[i] > from.u[i];
  while (hi - lo > 1e-3 * tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = ode::hermite_component(from, to, mid, i) - level;
    if ((v < 0.0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  ode::Node node = solver.attempt(from, t - from.t).next;
  for (int iter = 0; iter < 2; ++iter) {
    const double slope = node.du[i];
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next_t = std::clamp(t - (node.u[i] - level) / slope, from.t, to.t);
    if (next_t == t) break;
    t = next_t;
    node = t == from.t ? from : solver.attempt(from, t - from.t).next;
  }
  return node;
}

}  // namespace

std::pair<FluidTrajectory, CriticalConstants> integrate(const BoundedSizeRule& rule, double tol) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("tol must lie in (0, 1e-3]");
  const std::uint32_t K = rule.bound();
  const std::size_t T = std::size_t{K} + 1;
  constexpr double kSlack = 1e-3;

  CriticalConstants cc;
  cc.rule_fingerprint = rule.fingerprint();
  cc.tol = tol;

  std::vector<ode::Node> early, late;
  ode::State start(T + 2, 0.0);
  start[0] = 1.0;
  double t0 = 0.0;

  if (K == 0) {
    // Every vertex is already in a large component: s2 = s3 = 1, so y = z = 1.
    start[T] = 1.0;
    start[T + 1] = 1.0;
  } else {
    ode::DormandPrince solver(
        [&](double, const ode::State& u, ode::State& du) {
          const std::span<const double> x(u.data(), T);
          const RateEvaluation ev = rate_functions(rule, x, kSlack);
          std::copy(ev.drift.begin(), ev.drift.end(), du.begin());
          const auto [d2, d3] = susceptibility_drifts(ev.rates, x, u[T], u[T + 1]);
          du[T] = d2;
          du[T + 1] = d3;
        },
        tol, tol, kMaxStep);
    ode::Node node = solver.make_node(0.0, start);
    early.push_back(node);
    for (;;) {
      ode::Node next = solver.advance(node);
      if (next.u[T] >= 1.0) {
        ode::Node sw = locate_crossing(solver, node, next, T, 1.0, tol);
        early.push_back(sw);
        break;
      }
      if (next.t > kTimeCap) throw FluidError("no blow-up found");
      early.push_back(next);
      node = std::move(next);
    }
    cc.steps += solver.accepted();
    cc.rejected += solver.rejected();
    const ode::Node& sw = early.back();
    t0 = sw.t;
    std::copy(sw.u.begin(), sw.u.begin() + T, start.begin());
    const double y = 1.0 / sw.u[T];
    start[T] = y;
    start[T + 1] = sw.u[T + 1] * y * y * y;
  }

  ode::DormandPrince solver(
      [&](double, const ode::State& u, ode::State& du) {
        const std::span<const double> x(u.data(), T);
        const RateEvaluation ev = rate_functions(rule, x, kSlack);
        std::copy(ev.drift.begin(), ev.drift.end(), du.begin());
        const auto [dy, dz] = yz_drifts(ev.rates, x, u[T], u[T + 1]);
        du[T] = dy;
        du[T + 1] = dz;
      },
      tol, tol, kMaxStep);
  ode::Node node = solver.make_node(t0, start);
  late.push_back(node);
  for (;;) {
    ode::Node next = solver.advance(node);
    if (next.u[T] <= 0.0) {
      late.push_back(locate_crossing(solver, node, next, T, 0.0, tol));
      break;
    }
    if (next.t > kTimeCap) throw FluidError("no blow-up found");
    late.push_back(next);
    node = std::move(next);
  }
  cc.steps += solver.accepted();
  cc.rejected += solver.rejected();

  const ode::Node& end = late.back();
  const std::span<const double> xc(end.u.data(), T);
  const RateEvaluation ev = rate_functions(rule, xc, kSlack);
  if (!(ev.rates.b > 0.0)) throw FluidError("degenerate rule: b(t_c) is not positive");
  cc.t_c = end.t;
  cc.b_tc = ev.rates.b;
  cc.alpha = 1.0 / ev.rates.b;
  cc.beta = end.u[T + 1];
  cc.switch_time = t0;
  if (!(cc.beta > 0.0)) throw FluidError("degenerate rule: beta is not positive");
  return {FluidTrajectory(K, std::move(early), std::move(late)), cc};
}

std::vector<double> fractions_at(const BoundedSizeRule& rule, double t, double tol) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("tol must lie in (0, 1e-3]");
  const std::size_t T = std::size_t{rule.bound()} + 1;
  ode::State x0(T, 0.0);
  x0[0] = 1.0;
  if (t == 0.0) return x0;
  ode::DormandPrince solver(
      [&](double, const ode::State& u, ode::State& du) {
        du = rate_functions(rule, u, 1e-3).drift;
      },
      tol, tol, kMaxStep);
  ode::Node node = solver.make_node(0.0, x0);
  for (;;) {
    ode::Node next = solver.advance(node);
    if (next.t >= t) return solver.attempt(node, t - node.t).next.u;
    node = std::move(next);
  }
}

}  // namespace critmc
