#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "critmc/exploration.hpp"
#include "critmc/stats.hpp"

using namespace critmc;

namespace {

WalkPath path(std::initializer_list<std::pair<double, double>> points) {
  WalkPath w;
  for (auto [t, v] : points) w.append(t, v);
  return w;
}

std::map<std::uint64_t, double> poisson_law(double mean, std::uint64_t kmax) {
  std::map<std::uint64_t, double> law;
  double p = std::exp(-mean);
  for (std::uint64_t k = 0; k <= kmax; ++k, p *= mean / double(k)) law[k] = p;
  return law;
}

}  // namespace

TEST_CASE("walk path evaluation") {
  WalkPath w;
  w.append(0.0, 0.0);
  w.append(1.0, -1.0, 2.0);
  w.append(3.0, 0.0);
  CHECK(w.value_at(0.5) == -0.5);
  CHECK(w.value_at(1.0) == 2.0);
  CHECK(w.left_limit(1.0) == -1.0);
  CHECK(w.value_at(2.0) == 1.0);
  CHECK(w.left_limit(2.0) == 1.0);
  CHECK(w.value_at(5.0) == 0.0);
  CHECK_THROWS_AS(w.append(2.0, 0.0), std::invalid_argument);
  w.append(3.0, 0.0, 4.0);
  CHECK(w.size() == 3);
  CHECK(w.value_at(3.0) == 4.0);
  CHECK_THROWS_AS(WalkPath().value_at(0.0), std::logic_error);
}

TEST_CASE("reflect examples") {
  const auto up = path({{0, 0}, {1, 0.5}, {2, 0.5}, {3, 2}});
  const auto r = reflect(up);
  for (double t : {0.0, 0.5, 1.0, 1.7, 2.5, 3.0}) CHECK(r.value_at(t) == up.value_at(t));

  const auto down = reflect(path({{0, 0}, {4, -4}}));
  for (double t : {0.0, 1.0, 2.5, 4.0}) CHECK(down.value_at(t) == 0.0);

  const auto mixed = reflect(path({{0, 0}, {1, 1}, {2, -1}, {3, 0.5}}));
  CHECK(mixed.value_at(0) == 0.0);
  CHECK(mixed.value_at(1) == 1.0);
  CHECK(mixed.value_at(1.5) == 0.0);
  CHECK(mixed.value_at(2) == 0.0);
  CHECK(mixed.value_at(3) == 1.5);
  CHECK(mixed.value_at(1.25) == doctest::Approx(0.5));
}

TEST_CASE("reflect uses left limits in the running minimum") {
  WalkPath w;
  w.append(0.0, 0.0);
  w.append(1.0, -1.0, 1.0);  // dips to -1 just before the jump
  w.append(2.0, 1.0);
  const auto r = reflect(w);
  CHECK(r.value_at(1.0) == 2.0);
  CHECK(r.left_limit(1.0) == 0.0);
  CHECK(r.value_at(1.5) == 2.0);
}

TEST_CASE("reflected paths are nonnegative and start at zero") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    WalkPath w;
    double t = 0.0, v = rng.normal();
    w.append(t, v);
    for (int k = 0; k < 50; ++k) {
      t += 0.01 + rng.uniform();
      const double before = v + rng.normal();
      v = before + (rng.uniform() < 0.3 ? rng.exponential(1.0) : 0.0);
      w.append(t, before, v);
    }
    const auto r = reflect(w);
    CHECK(r.value_at(0.0) == 0.0);
    bool nonnegative = true;
    for (std::size_t k = 0; k < r.size(); ++k)
      nonnegative = nonnegative && r.before()[k] >= -1e-12 && r.after()[k] >= -1e-12;
    CHECK(nonnegative);
    for (int k = 0; k < 200; ++k) {
      const double s = t * rng.uniform();
      double m = w.before()[0];
      for (std::size_t j = 0; j < w.size() && w.times()[j] <= s; ++j)
        m = std::min({m, w.before()[j], w.after()[j]});
      m = std::min({m, w.value_at(s), w.left_limit(s)});
      CHECK(r.value_at(s) == doctest::Approx(w.value_at(s) - m).epsilon(1e-9));
    }
  }
}

TEST_CASE("extract_excursions examples") {
  CHECK(extract_excursions(path({{0, 0}, {5, 0}}), {}).empty());

  const auto one = extract_excursions(path({{0, 0}, {1, 1}, {2, 0}}), {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].length == 2.0);
  CHECK(one[0].area == 1.0);
  CHECK(one[0].marks == 0);

  const auto two = extract_excursions(
      path({{0, 0}, {1, 1}, {2, 0}, {3, 0}, {3.5, 0.5}, {4, 0}}), {0.5, 3.2, 3.9, 2.5, 4.0});
  REQUIRE(two.size() == 2);
  CHECK(two[0].length == 2.0);
  CHECK(two[0].start == 0.0);
  CHECK(two[0].marks == 1);
  CHECK(two[1].length == 1.0);
  CHECK(two[1].area == 0.25);
  CHECK(two[1].marks == 2);
}

TEST_CASE("extract_excursions drops an open tail") {
  const auto w = path({{0, 0}, {1, 1}, {2, 0}, {3, 2}});
  CHECK(extract_excursions(w, {}).size() == 1);
  CHECK(open_tail_length(w) == 1.0);
  CHECK(open_tail_length(path({{0, 0}, {1, 1}, {2, 0}})) == 0.0);
}

TEST_CASE("bfs_walk_build validates input") {
  CHECK_THROWS_AS(bfs_walk_build({}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bfs_walk_build({1.0}, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bfs_walk_build({1.0, -1.0}, 1.0, 1), std::invalid_argument);
}

TEST_CASE("single vertex walk") {
  const BfsWalk w = bfs_walk_build({1.0}, 3.0, 5);
  CHECK(w.components.size() == 1);
  CHECK(w.components[0].mass == 1.0);
  CHECK(w.total_length == 1.0);
  CHECK(w.walk.value_at(0.0) == 0.0);
  CHECK(w.walk.value_at(0.25) == -0.25);
  CHECK(w.walk.left_limit(1.0) == -1.0);
  const auto r = reflect(w.walk);
  for (double t : {0.0, 0.3, 0.9, 1.0}) CHECK(r.value_at(t) == 0.0);
  CHECK(!exploration_mismatch(w));
}

TEST_CASE("single vertex surplus is Poisson(q/2)") {
  const double q = 2.0;
  const int runs = 100000;
  std::map<std::uint64_t, double> counts;
  Rng rng(42);
  for (int r = 0; r < runs; ++r) counts[bfs_walk_build({1.0}, q, rng).components[0].surplus] += 1;
  CHECK(tv_distance(counts, poisson_law(q / 2, 15)) < 0.01);
}

TEST_CASE("two unit vertices stay apart with probability exp(-q)") {
  const double q = 0.8;
  const int runs = 100000;
  int apart = 0;
  Rng rng(43);
  for (int r = 0; r < runs; ++r) apart += bfs_walk_build({1.0, 1.0}, q, rng).components.size() == 2;
  const double p = std::exp(-q), sd = std::sqrt(p * (1 - p) / runs);
  CHECK(std::fabs(apart / double(runs) - p) < 3 * sd);
}

TEST_CASE("exploration consistency on random instances") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const WalkInstance in = random_walk_instance(rng);
    const BfsWalk w = bfs_walk_build(in.masses, in.q, rng);
    CHECK(!exploration_mismatch(w));
    const double total = std::accumulate(in.masses.begin(), in.masses.end(), 0.0);
    CHECK(w.components.total_mass() == doctest::Approx(total));
    CHECK(w.total_length == doctest::Approx(total));
    CHECK(w.marks.size() == w.components.total_surplus());
    CHECK(std::is_sorted(w.marks.begin(), w.marks.end()));

    const auto exc = extract_excursions(reflect(w.exploration), w.marks);
    REQUIRE(exc.size() == w.components.size());
    for (std::size_t i = 0; i < exc.size(); ++i) {
      CHECK(std::fabs(exc[i].length - w.components[i].mass) <= 1e-9);
      CHECK(exc[i].marks == w.components[i].surplus);
    }

    // The paper's walk differs from the queue walk by at most the largest mass.
    const double x_star = *std::max_element(in.masses.begin(), in.masses.end());
    const auto rz = reflect(w.walk);
    for (double t : w.exploration.times()) {
      CHECK(std::fabs(rz.value_at(t) - w.exploration.value_at(t)) <= x_star + 1e-9);
    }
    CHECK(mark_rate_gap(w, in.q) <= 1.5 * in.q * x_star * (1 + 1e-12));
  }
}

TEST_CASE("walk_diagnostics") {
  const std::uint32_t n = 1000;
  const double x = std::pow(double(n), -2.0 / 3.0);
  const double lambda = 0.5;
  const double q = lambda + std::cbrt(double(n));
  const auto d = walk_diagnostics(std::vector<double>(n, x), q, 1.0, 7);
  CHECK(d.s1 == doctest::Approx(10.0));
  CHECK(d.s2 == doctest::Approx(0.1));
  CHECK(d.s3 == doctest::Approx(1e-3));
  CHECK(d.ratio_s3_s2cubed == doctest::Approx(1.0));
  CHECK(d.q_minus_inv_s2 == doctest::Approx(lambda));
  CHECK(d.x_star == doctest::Approx(x));
  CHECK(d.x_star_over_s2 == doctest::Approx(0.1));
  CHECK(d.precondition_value == doctest::Approx(10.0 * 0.1));
  CHECK(d.r_bound_ok);

  const auto u = walk_diagnostics({1.0}, 2.0, 1.0, 7);
  CHECK(u.x_star_over_s2 == 1.0);
  CHECK(u.ratio_s3_s2cubed == 1.0);
  CHECK(u.r_bound_ok);
}

TEST_CASE("run_walk_check passes") {
  const auto report = run_walk_check(200, 1);
  CHECK(report.instances == 200);
  CHECK(report.ok());
  CHECK(report.worst_gap_ratio <= 1.0 + 1e-12);
  CHECK(!report.first_failure);
}

TEST_CASE("sample_limit validates input") {
  CHECK_THROWS_AS(sample_limit(0.0, 0.0, 15.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_limit(0.0, 0.02, 15.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_limit(0.0, 1e-3, 9.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_limit(5.0, 1e-3, 15.0, 1), std::invalid_argument);
  CHECK_NOTHROW(sample_limit(5.0, 1e-3, 20.0, 1));
}

TEST_CASE("zero-noise limit is the parabola") {
  const LimitSample s = sample_limit(1.0, 1e-3, 15.0, 3, 0.0);
  REQUIRE(s.excursions.size() == 1);
  CHECK(s.excursions[0].length == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.excursions[0].area == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(s.state.size() == 1);
  CHECK(s.state[0].mass == s.excursions[0].length);
  CHECK(s.state[0].surplus == s.excursions[0].marks);
  CHECK(s.tail_length == 0.0);
  CHECK(sample_limit(-1.0, 1e-3, 15.0, 3, 0.0).excursions.empty());
}

TEST_CASE("limit marks are Poisson in the area") {
  const int runs = 50000;
  std::map<std::uint64_t, double> counts;
  double area = 0.0;
  Rng rng(45);
  for (int r = 0; r < runs; ++r) {
    const LimitSample s = sample_limit(1.0, 1e-2, 10.0, rng, 0.0);
    area = s.excursions.at(0).area;
    counts[s.excursions[0].marks] += 1;
  }
  CHECK(tv_distance(counts, poisson_law(area, 15)) < 0.015);
}

TEST_CASE("largest limit excursion grows with lambda") {
  std::vector<double> low, mid;
  for (int r = 0; r < 1000; ++r) {
    const auto a = sample_limit(-5.0, 1e-3, 20.0, derive_seed(46, "low", r));
    const auto b = sample_limit(0.0, 1e-3, 20.0, derive_seed(46, "mid", r));
    low.push_back(a.excursions.empty() ? 0.0 : a.excursions[0].length);
    mid.push_back(b.excursions.empty() ? 0.0 : b.excursions[0].length);
  }
  const Moments ml = moments(low), mm = moments(mid);
  CHECK(mm.mean - ml.mean > 3 * std::hypot(ml.sem(), mm.sem()));
}

TEST_CASE("limit samples leave little mass past the horizon") {
  double tail = 0.0, total = 0.0;
  for (int r = 0; r < 200; ++r) {
    const auto s = sample_limit(2.0, 1e-3, 18.0, derive_seed(47, "tail", r));
    tail += s.tail_length;
    total += s.tail_length + s.state.total_mass();
  }
  CHECK(tail < 1e-3 * total);
}

TEST_CASE("seeded samples reproduce") {
  const auto a = sample_limit(0.5, 1e-3, 15.0, 9);
  const auto b = sample_limit(0.5, 1e-3, 15.0, 9);
  CHECK(a.state == b.state);
  const auto wa = bfs_walk_build({0.5, 1.0, 0.25}, 3.0, 9);
  const auto wb = bfs_walk_build({0.5, 1.0, 0.25}, 3.0, 9);
  CHECK(wa.components == wb.components);
  CHECK(wa.marks == wb.marks);
}
