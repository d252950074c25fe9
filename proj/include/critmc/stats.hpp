#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>

namespace critmc {

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  /// Standard error of the mean.
  double sem() const { return count > 0 ? std::sqrt(variance / double(count)) : 0.0; }
};

Moments moments(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((√m + 0.12 + 0.11/√m) D), m = n₁n₂/(n₁+n₂).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²).
double kolmogorov_q(double lambda);

/// Total-variation distance between two empirical laws given as counts.
template <class Key, class Count>
double tv_distance(const std::map<Key, Count>& a, const std::map<Key, Count>& b) {
  double na = 0.0, nb = 0.0;
  for (const auto& [k, c] : a) na += double(c);
  for (const auto& [k, c] : b) nb += double(c);
  std::map<Key, std::pair<double, double>> joint;
  for (const auto& [k, c] : a) joint[k].first = double(c) / na;
  for (const auto& [k, c] : b) joint[k].second = double(c) / nb;
  double d = 0.0;
  for (const auto& [k, p] : joint) d += std::fabs(p.first - p.second);
  return 0.5 * d;
}

}  // namespace critmc
