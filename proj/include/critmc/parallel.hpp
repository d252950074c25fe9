#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

namespace critmc {

enum class Execution { serial, parallel };

/// Worker count: CRITMC_THREADS when set to a positive integer, otherwise
/// the OpenMP default.
int thread_cap();

/// Evaluates f(0), ..., f(count-1) and returns the results in index order.
/// Each call must depend only on its index (seeds come from derive_seed), so
/// both execution modes return identical vectors.
template <class F>
auto run_replicates(std::size_t count, F&& f, Execution mode = Execution::parallel)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  if (mode == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_cap())
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(critmc_run_replicates)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace critmc
