#include "critmc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace critmc {

int thread_cap() {
  if (const char* env = std::getenv("CRITMC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace critmc
