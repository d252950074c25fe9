#include "critmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "critmc/exploration.hpp"
#include "critmc/random.hpp"

namespace critmc {

namespace {

void require_sorted(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw std::invalid_argument(std::string(what) + " must be strictly increasing");
}

void require_subcritical(const std::vector<double>& times, const CriticalConstants& c,
                         std::uint32_t n, double gamma) {
  const double end = subcritical_end(c, n, gamma);
  for (double t : times)
    if (!(t >= 0.0 && t <= end + 1e-12))
      throw std::invalid_argument("checkpoint " + std::to_string(t) + " outside [0, t_c - n^-gamma]");
}

}  // namespace

void WindowConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(gamma > 1.0 / 6.0 && gamma < 0.2)) throw std::invalid_argument("gamma must lie in (1/6, 1/5)");
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
  if (top_k == 0) throw std::invalid_argument("top_k must be positive");
  require_sorted(lambdas, "lambda grid");
  if (constants.rule_fingerprint != rule.fingerprint())
    throw std::invalid_argument("critical constants were computed for a different rule");
  for (double l : lambdas)
    if (!(window_time(constants, n, l) >= 0.0))
      throw std::invalid_argument("lambda " + std::to_string(l) + " gives a negative window time");
}

std::vector<ScaledRecord> run_window(const WindowConfig& cfg, Execution mode) {
  cfg.validate();
  const auto per_replicate = run_replicates(
      cfg.replicates,
      [&](std::size_t r) {
        std::vector<ScaledRecord> out;
        BsrProcess process(cfg.rule, cfg.n, derive_seed(cfg.seed, "window", r));
        for (double lambda : cfg.lambdas) {
          process.advance_to(window_time(cfg.constants, cfg.n, lambda));
          const RescaledRecord rec = rescale(process.snapshot(cfg.top_k), cfg.constants, cfg.top_k);
          for (std::size_t i = 0; i < rec.top.size(); ++i)
            out.push_back({r, lambda, static_cast<std::uint32_t>(i + 1), rec.top[i].size,
                           rec.top[i].surplus, rec.weighted_surplus});
        }
        return out;
      },
      mode);
  std::vector<ScaledRecord> out;
  for (const auto& v : per_replicate) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<SnapshotRecord> run_snapshots(const BoundedSizeRule& rule, std::uint32_t n,
                                          const std::vector<double>& times,
                                          std::size_t replicates, std::size_t top_k,
                                          std::uint64_t seed, const CriticalConstants* constants,
                                          Execution mode) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (top_k == 0) throw std::invalid_argument("top_k must be positive");
  require_sorted(times, "snapshot times");
  if (!times.empty() && times.front() < 0.0) throw std::invalid_argument("times must be nonnegative");
  const auto per_replicate = run_replicates(
      replicates,
      [&](std::size_t r) {
        std::vector<SnapshotRecord> out;
        BsrProcess process(rule, n, derive_seed(seed, "simulate", r));
        for (double t : times) {
          process.advance_to(t);
          const ComponentStats s = process.snapshot(top_k);
          const double lambda =
              constants ? (t - constants->t_c) * std::cbrt(double(n)) /
                              (constants->alpha * std::pow(constants->beta, 2.0 / 3.0))
                        : std::numeric_limits<double>::quiet_NaN();
          for (std::size_t i = 0; i < s.components.size(); ++i)
            out.push_back({r, t, lambda, static_cast<std::uint32_t>(i + 1), s.components[i].size,
                           s.components[i].surplus, s.s2bar, s.s3bar});
        }
        return out;
      },
      mode);
  std::vector<SnapshotRecord> out;
  for (const auto& v : per_replicate) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<ScaledRecord> run_limit_reference(const LimitConfig& cfg, Execution mode) {
  if (cfg.top_k == 0) throw std::invalid_argument("top_k must be positive");
  require_sorted(cfg.lambdas, "lambda grid");
  const std::size_t per_lambda = cfg.replicates;
  const auto samples = run_replicates(
      cfg.lambdas.size() * per_lambda,
      [&](std::size_t idx) {
        const std::size_t li = idx / per_lambda, r = idx % per_lambda;
        const double lambda = cfg.lambdas[li];
        Rng rng(derive_seed(derive_seed(cfg.seed, "limit", li), "replicate", r));
        const LimitSample s = sample_limit(lambda, cfg.step, cfg.horizon, rng);
        const double weighted = s.state.mass_surplus();
        std::vector<ScaledRecord> out;
        const std::size_t k = std::min(cfg.top_k, s.excursions.size());
        for (std::size_t i = 0; i < k; ++i) {
          const ExcursionRecord& e = s.excursions[i];
          out.push_back({r, lambda, static_cast<std::uint32_t>(i + 1), e.length, e.marks,
                         weighted, e.area});
        }
        if (out.empty()) out.push_back({r, lambda, 1, 0.0, 0, 0.0, 0.0});
        return out;
      },
      mode);
  // Emit grouped by replicate then λ, matching run_window.
  std::vector<ScaledRecord> out;
  for (std::size_t r = 0; r < per_lambda; ++r)
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
      const auto& v = samples[li * per_lambda + r];
      out.insert(out.end(), v.begin(), v.end());
    }
  return out;
}

ComparisonReport compare(const std::vector<ScaledRecord>& empirical,
                         const std::vector<ScaledRecord>& reference) {
  struct Side {
    std::vector<double> c1, y1, weighted;
  };
  auto group = [](const std::vector<ScaledRecord>& records) {
    std::map<double, Side> by_lambda;
    for (const ScaledRecord& r : records) {
      Side& s = by_lambda[r.lambda];
      if (r.rank != 1) continue;
      s.c1.push_back(r.size);
      s.y1.push_back(double(r.surplus));
      s.weighted.push_back(r.weighted_sum);
    }
    return by_lambda;
  };
  const auto emp = group(empirical), ref = group(reference);
  auto same_grid = [&] {
    if (emp.size() != ref.size()) return false;
    for (auto a = emp.begin(), b = ref.begin(); a != emp.end(); ++a, ++b)
      if (std::fabs(a->first - b->first) > 1e-12 * std::max(1.0, std::fabs(a->first))) return false;
    return true;
  };
  if (!same_grid()) throw ComparisonError("lambda grids of the two record streams differ");

  ComparisonReport report;
  for (auto a = emp.begin(), b = ref.begin(); a != emp.end(); ++a, ++b) {
    const Side& e = a->second;
    const Side& r = b->second;
    if (e.c1.size() < 30 || r.c1.size() < 30)
      throw ComparisonError("lambda " + std::to_string(a->first) +
                            ": fewer than 30 samples on one side (" + std::to_string(e.c1.size()) +
                            " vs " + std::to_string(r.c1.size()) + ")");
    LambdaComparison row;
    row.lambda = a->first;
    row.empirical_c1 = moments(e.c1);
    row.reference_c1 = moments(r.c1);
    row.empirical_y1 = moments(e.y1);
    row.reference_y1 = moments(r.y1);
    row.empirical_weighted = moments(e.weighted);
    row.reference_weighted = moments(r.weighted);
    row.ks = ks_two_sample(e.c1, r.c1);
    const double diff = std::fabs(row.empirical_y1.mean - row.reference_y1.mean);
    const double se = std::hypot(row.empirical_y1.sem(), row.reference_y1.sem());
    row.y1_z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
    report.rows.push_back(row);
  }
  return report;
}

double subcritical_end(const CriticalConstants& c, std::uint32_t n, double gamma) {
  return c.t_c - std::pow(double(n), -gamma);
}

std::vector<double> uniform_checkpoints(double t_end, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {0.0};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = t_end * double(i) / double(count - 1);
  out.back() = t_end;
  return out;
}

std::vector<double> susceptibility_grid(double t_end, std::size_t count) {
  if (count < 2) return {0.0};
  std::vector<double> out;
  const std::size_t geometric = count - 1;
  for (std::size_t k = 0; k < geometric; ++k) {
    const double frac = geometric > 1 ? double(k) / double(geometric - 1) : 0.0;
    out.push_back(t_end - t_end * std::pow(1e-3, frac));
  }
  out.front() = 0.0;
  out.push_back(t_end);
  return out;
}

SubcriticalReport check_subcritical(const BoundedSizeRule& rule, std::uint32_t n, double gamma,
                                    const std::vector<double>& checkpoints, std::uint64_t seed,
                                    const CriticalConstants& constants) {
  require_sorted(checkpoints, "checkpoints");
  require_subcritical(checkpoints, constants, n, gamma);
  SubcriticalReport rep;
  BsrProcess process(rule, n, seed);
  const double log4 = std::pow(std::log(double(n)), 4.0);
  for (double t : checkpoints) {
    process.advance_to(t);
    const double gap = constants.t_c - t;
    const double ratio = double(process.ledger().largest()) * gap * gap / log4;
    rep.times.push_back(t);
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

SusceptibilityReport check_susceptibility(const BoundedSizeRule& rule, std::uint32_t n,
                                          double gamma, const std::vector<double>& grid,
                                          std::uint64_t seed, const FluidTrajectory& fluid,
                                          const CriticalConstants& constants) {
  require_sorted(grid, "grid");
  require_subcritical(grid, constants, n, gamma);
  SusceptibilityReport rep;
  rep.grid = grid;
  BsrProcess process(rule, n, seed);
  const double n13 = std::cbrt(double(n));
  for (double t : grid) {
    process.advance_to(t);
    const double s2bar = process.ledger().s2bar(), s3bar = process.ledger().s3bar();
    const double s2 = fluid.s2(t), s3 = fluid.s3(t);
    rep.sup_inv_s2 = std::max(rep.sup_inv_s2, std::fabs(n13 / s2bar - n13 / s2));
    rep.sup_s3_ratio =
        std::max(rep.sup_s3_ratio, std::fabs(s3bar / (s2bar * s2bar * s2bar) - s3 / (s2 * s2 * s2)));
  }
  return rep;
}

std::vector<DriftEstimate> estimate_drift(const BoundedSizeRule& rule, std::uint32_t n,
                                          const std::vector<double>& times, double dt,
                                          std::size_t replicates, std::uint64_t seed,
                                          Execution mode) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  require_sorted(times, "times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1] + dt) throw std::invalid_argument("times must be at least dt apart");
  const std::uint32_t K = rule.bound();
  const std::size_t T = std::size_t{K} + 1;

  auto fractions = [&](const ComponentLedger& ledger) {
    std::vector<double> x(T);
    for (std::uint32_t i = 1; i <= K; ++i) x[i - 1] = double(ledger.type_count(i)) / n;
    x[K] = double(ledger.large_count()) / n;
    return x;
  };
  // rates[r][k][i]: replicate r, time k, type i.
  const auto rates = run_replicates(
      replicates,
      [&](std::size_t r) {
        std::vector<std::vector<double>> out;
        BsrProcess process(rule, n, derive_seed(seed, "drift", r));
        for (double t : times) {
          process.advance_to(t);
          const auto a = fractions(process.ledger());
          process.advance_to(t + dt);
          const auto b = fractions(process.ledger());
          std::vector<double> d(T);
          for (std::size_t i = 0; i < T; ++i) d[i] = (b[i] - a[i]) / dt;
          out.push_back(std::move(d));
        }
        return out;
      },
      mode);

  std::vector<DriftEstimate> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    DriftEstimate e;
    e.t = times[k];
    const auto xa = fractions_at(rule, times[k], 1e-10);
    const auto xb = fractions_at(rule, times[k] + dt, 1e-10);
    for (std::size_t i = 0; i < T; ++i) {
      e.predicted.push_back((xb[i] - xa[i]) / dt);
      std::vector<double> samples;
      for (std::size_t r = 0; r < replicates; ++r) samples.push_back(rates[r][k][i]);
      const Moments m = moments(samples);
      e.mean.push_back(m.mean);
      e.sem.push_back(m.sem());
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace critmc
