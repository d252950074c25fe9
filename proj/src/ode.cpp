#include "critmc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critmc::ode {

double hermite_component(const Node& a, const Node& b, double t, std::size_t i) {
  const double h = b.t - a.t;
  if (h == 0.0) return a.u[i];
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * a.u[i] + h10 * h * a.du[i] + h01 * b.u[i] + h11 * h * b.du[i];
}

State hermite(const Node& a, const Node& b, double t) {
  State out(a.u.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = hermite_component(a, b, t, i);
  return out;
}

namespace {

// Dormand & Prince (1980) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

DormandPrince::DormandPrince(Rhs f, double rtol, double atol, double h_max)
    : f_(std::move(f)), rtol_(rtol), atol_(atol), h_max_(h_max), h_(std::min(1e-3, h_max)) {}

Node DormandPrince::make_node(double t, State u) const {
  Node n{t, std::move(u), {}};
  n.du.resize(n.u.size());
  f_(t, n.u, n.du);
  return n;
}

DormandPrince::Trial DormandPrince::attempt(const Node& from, double h) const {
  const std::size_t d = from.u.size();
  const State& y = from.u;
  const State& k1 = from.du;
  State k2(d), k3(d), k4(d), k5(d), k6(d), tmp(d);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  f_(from.t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f_(from.t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < d; ++i)
    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f_(from.t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < d; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f_(from.t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < d; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f_(from.t + h, tmp, k6);

  Trial trial;
  trial.next.t = from.t + h;
  trial.next.u.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    trial.next.u[i] =
        y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  trial.next.du.resize(d);
  f_(trial.next.t, trial.next.u, trial.next.du);  // FSAL stage k7
  const State& k7 = trial.next.du;
  double err = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
    const double scale = atol_ + rtol_ * std::max(std::fabs(y[i]), std::fabs(trial.next.u[i]));
    err = std::max(err, std::fabs(e) / scale);
  }
  trial.error = std::isfinite(err) ? err : INFINITY;
  return trial;
}

Node DormandPrince::advance(const Node& from) {
  for (;;) {
    if (h_ < 1e-14 * std::max(1.0, std::fabs(from.t)))
      throw std::runtime_error("ode: step size underflow");
    Trial trial = attempt(from, h_);
    const double factor =
        trial.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(trial.error, -0.2), 0.2, 5.0);
    if (trial.error <= 1.0) {
      ++accepted_;
      h_ = std::min(h_ * factor, h_max_);
      return std::move(trial.next);
    }
    ++rejected_;
    h_ *= std::min(factor, 0.9);
  }
}

}  // namespace critmc::ode
