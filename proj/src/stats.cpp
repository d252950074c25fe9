#include "critmc/stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace critmc {

Moments moments(std::span<const double> values) {
  Moments m;
  m.count = values.size();
  if (values.empty()) return m;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  m.mean = mean;
  m.variance = values.size() > 1 ? ss / double(values.size() - 1) : 0.0;
  return m;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 0.3) {
    // The alternating series converges slowly here; use the theta-function
    // dual form 1 − √(2π)/λ Σ exp(−(2k−1)²π²/(8λ²)).
    constexpr double pi = 3.14159265358979323846;
    double s = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = double(x.size()), ny = double(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(double(i) / nx - double(j) / ny));
  }
  KsResult r;
  r.statistic = d;
  const double m = std::sqrt(nx * ny / (nx + ny));
  r.p_value = kolmogorov_q((m + 0.12 + 0.11 / m) * d);
  return r;
}

}  // namespace critmc
