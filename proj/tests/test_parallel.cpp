#include <doctest.h>

#include <cstdlib>
#include <stdexcept>

#include "critmc/parallel.hpp"
#include "critmc/random.hpp"

using namespace critmc;

TEST_CASE("run_replicates returns results in index order in both modes") {
  auto f = [](std::size_t i) {
    Rng rng(derive_seed(71, "replicate", i));
    double s = 0.0;
    for (int k = 0; k < 1000; ++k) s += rng.uniform();
    return s;
  };
  const auto serial = run_replicates(64, f, Execution::serial);
  const auto parallel = run_replicates(64, f, Execution::parallel);
  CHECK(serial == parallel);
  CHECK(run_replicates(0, f).empty());
}

TEST_CASE("run_replicates rethrows worker exceptions") {
  auto f = [](std::size_t i) -> int {
    if (i == 5) throw std::runtime_error("boom");
    return int(i);
  };
  CHECK_THROWS_AS(run_replicates(16, f, Execution::parallel), std::runtime_error);
  CHECK_THROWS_AS(run_replicates(16, f, Execution::serial), std::runtime_error);
}

TEST_CASE("thread cap honours the environment") {
  setenv("CRITMC_THREADS", "1", 1);
  CHECK(thread_cap() == 1);
  setenv("CRITMC_THREADS", "junk", 1);
  CHECK(thread_cap() >= 1);
  unsetenv("CRITMC_THREADS");
  CHECK(thread_cap() >= 1);
}
