#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "critmc/random.hpp"
#include "critmc/stats.hpp"

using namespace critmc;

TEST_CASE("moments") {
  const std::vector<double> v{1, 2, 3, 4};
  const Moments m = moments(v);
  CHECK(m.count == 4);
  CHECK(m.mean == 2.5);
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  CHECK(m.sem() == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(moments(std::vector<double>{}).count == 0);
  CHECK(moments(std::vector<double>{7}).variance == 0.0);
}

TEST_CASE("kolmogorov distribution") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-9));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996716735182).epsilon(1e-9));
  CHECK(kolmogorov_q(1.3580986393225505) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(kolmogorov_q(3.0) < 1e-7);
  // The two series agree where they meet.
  CHECK(kolmogorov_q(0.3 - 1e-9) == doctest::Approx(kolmogorov_q(0.3 + 1e-9)).epsilon(1e-8));
  double previous = 1.0;
  for (double l = 0.01; l < 3.0; l += 0.01) {
    const double q = kolmogorov_q(l);
    CHECK(q <= previous + 1e-15);
    CHECK(q >= 0.0);
    previous = q;
  }
}

TEST_CASE("ks on identical and disjoint samples") {
  std::vector<double> a;
  Rng rng(51);
  for (int i = 0; i < 500; ++i) a.push_back(rng.uniform());
  const KsResult same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  std::vector<double> shifted(a);
  for (double& v : shifted) v += 1.0;
  const KsResult apart = ks_two_sample(a, shifted);
  CHECK(apart.statistic == 1.0);
  CHECK(apart.p_value < 1e-10);
  CHECK_THROWS_AS(ks_two_sample(a, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("ks statistic on a hand example with ties") {
  const std::vector<double> a{1, 2, 2, 3}, b{2, 4};
  // Steps: at 1: 1/4 vs 0; at 2: 3/4 vs 1/2; at 3: 1 vs 1/2; at 4: 1 vs 1.
  CHECK(ks_two_sample(a, b).statistic == 0.5);
}

TEST_CASE("ks null distribution on split samples") {
  int accepted = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(52, "ks-null", trial));
    std::vector<double> x(5000), y(5000);
    for (double& v : x) v = rng.exponential(1.0);
    for (double& v : y) v = rng.exponential(1.0);
    const KsResult r = ks_two_sample(x, y);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    accepted += r.p_value > 0.01;
  }
  CHECK(accepted >= 95);
}

TEST_CASE("total variation distance") {
  const std::map<int, int> a{{0, 1}, {1, 1}}, b{{1, 1}, {2, 1}};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  CHECK(tv_distance(a, std::map<int, int>{{5, 3}}) == doctest::Approx(1.0));
  const std::map<int, double> scaled{{0, 10.0}, {1, 10.0}};
  CHECK(tv_distance(std::map<int, double>{{0, 1.0}, {1, 1.0}}, scaled) == 0.0);
}
