#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "critmc/coalescent.hpp"
#include "critmc/stats.hpp"

using namespace critmc;

namespace {

using Shape = std::pair<std::vector<double>, std::uint64_t>;

Shape shape(const AugmentedState& z) {
  Shape s;
  for (const Block& b : z.blocks()) s.first.push_back(b.mass);
  s.second = std::min<std::uint64_t>(z.total_surplus(), 3);
  return s;
}

AugmentedState random_state(Rng& rng) {
  std::vector<Block> blocks(rng.below(6));
  for (Block& b : blocks) b = {0.1 + 3 * rng.uniform(), rng.below(4)};
  return AugmentedState(blocks);
}

}  // namespace

TEST_CASE("augmented state ordering and validation") {
  const AugmentedState z({{1, 0}, {2, 0}, {2, 3}, {1, 1}});
  CHECK(z.blocks() == std::vector<Block>{{2, 3}, {2, 0}, {1, 1}, {1, 0}});
  CHECK(z.total_mass() == 6);
  CHECK(z.sum_squares() == 10);
  CHECK(z.mass_surplus() == 7);
  CHECK(z.total_surplus() == 4);
  CHECK_THROWS_AS(AugmentedState({{0.0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(AugmentedState({{-1.0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(AugmentedState({{INFINITY, 0}}), std::invalid_argument);
}

TEST_CASE("d_U examples") {
  const AugmentedState z({{3, 1}, {1, 0}});
  CHECK(d_U(z, z) == 0.0);
  CHECK(d_U(AugmentedState({{1, 0}}), AugmentedState({{1, 1}})) == 1.0);
  CHECK(d_U(z, AugmentedState({{2, 1}, {1, 0}})) == doctest::Approx(2.0));
  CHECK(d_U(AugmentedState(), AugmentedState({{3, 2}})) == doctest::Approx(3.0 + 6.0));
}

TEST_CASE("d_U is a metric") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_state(rng), b = random_state(rng), c = random_state(rng);
    CHECK(d_U(a, b) >= 0.0);
    CHECK(d_U(a, b) == d_U(b, a));
    CHECK(d_U(a, c) <= d_U(a, b) + d_U(b, c) + 1e-12);
    CHECK(d_U(a, a) == 0.0);
  }
}

TEST_CASE("parse_state_csv") {
  const auto z = parse_state_csv("# mass,surplus\n0.5,1\n\n2,0\n");
  CHECK(z.blocks() == std::vector<Block>{{2, 0}, {0.5, 1}});
  CHECK_THROWS_AS(parse_state_csv("1,x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_csv("1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_csv("1,-1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_csv("0,0\n"), std::invalid_argument);
}

TEST_CASE("trivial dynamics") {
  CHECK(amc_run(AugmentedState(), 3.0, 1).empty());
  CHECK(graphical_construction(AugmentedState(), 3.0, 1).empty());
  const AugmentedState z({{1, 3}, {0.5, 0}});
  CHECK(graphical_construction(z, 0.0, 1) == z);
  CHECK(amc_run(z, 0.0, 1) == z);
  CHECK(graphical_construction(AugmentedState({{1, 3}}), 0.0, 1) == AugmentedState({{1, 3}}));
  CHECK_THROWS_AS(amc_run(z, -1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(graphical_construction(z, -1.0, 1), std::invalid_argument);
}

TEST_CASE("mass conservation and surplus monotonicity") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = random_state(rng);
    const double t = 2 * rng.uniform();
    for (const auto& out : {amc_run(z, t, rng), graphical_construction(z, t, rng)}) {
      CHECK(out.total_mass() == doctest::Approx(z.total_mass()));
      CHECK(out.total_surplus() >= z.total_surplus());
      CHECK(out.size() <= z.size());
      for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].mass >= out[i].mass);
    }
  }
}

TEST_CASE("single block gains Poisson(t/2) surplus") {
  const double t = 1.0;
  const int runs = 100000;
  std::map<std::uint64_t, double> amc, graph, exact;
  Rng rng(33);
  const AugmentedState z({{1, 0}});
  for (int r = 0; r < runs; ++r) {
    amc[amc_run(z, t, rng).total_surplus()] += 1;
    graph[graphical_construction(z, t, rng).total_surplus()] += 1;
  }
  double p = std::exp(-t / 2);
  for (std::uint64_t k = 0; k < 12; ++k, p *= (t / 2) / double(k)) exact[k] = p;
  CHECK(tv_distance(amc, exact) < 0.01);
  CHECK(tv_distance(graph, exact) < 0.01);
}

TEST_CASE("two unit blocks stay apart with probability exp(-t)") {
  const double t = 0.7;
  const int runs = 100000;
  Rng rng(34);
  const AugmentedState z({{1, 0}, {1, 0}});
  int amc_two = 0, graph_two = 0;
  for (int r = 0; r < runs; ++r) {
    amc_two += amc_run(z, t, rng).size() == 2;
    graph_two += graphical_construction(z, t, rng).size() == 2;
  }
  const double p = std::exp(-t), sd = std::sqrt(p * (1 - p) / runs);
  CHECK(std::fabs(amc_two / double(runs) - p) < 3 * sd);
  CHECK(std::fabs(graph_two / double(runs) - p) < 3 * sd);
}

TEST_CASE("gillespie and graphical construction agree in law") {
  const AugmentedState z({{1, 0}, {1, 0}, {1, 0}});
  const int runs = 100000;
  std::map<Shape, int> amc, graph;
  for (int r = 0; r < runs; ++r) {
    ++amc[shape(amc_run(z, 0.5, derive_seed(35, "amc", r)))];
    ++graph[shape(graphical_construction(z, 0.5, derive_seed(35, "graph", r)))];
  }
  CHECK(tv_distance(amc, graph) < 0.02);
}

TEST_CASE("semigroup property") {
  const AugmentedState z({{1.5, 0}, {0.7, 1}});
  const int runs = 100000;
  std::map<Shape, int> direct, composed;
  for (int r = 0; r < runs; ++r) {
    ++direct[shape(amc_run(z, 0.8, derive_seed(36, "direct", r)))];
    Rng rng(derive_seed(36, "composed", r));
    ++composed[shape(amc_run(amc_run(z, 0.3, rng), 0.5, rng))];
  }
  CHECK(tv_distance(direct, composed) < 0.02);
}

TEST_CASE("seeded runs reproduce") {
  const AugmentedState z({{1.5, 0}, {0.7, 1}, {0.2, 0}});
  CHECK(amc_run(z, 1.0, 7) == amc_run(z, 1.0, 7));
  CHECK(graphical_construction(z, 1.0, 7) == graphical_construction(z, 1.0, 7));
}
