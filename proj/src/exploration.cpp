#include "critmc/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "detail/mass_index.hpp"

namespace critmc {

void WalkPath::append(double t, double before, double after) {
  if (!times_.empty()) {
    if (t < times_.back()) throw std::invalid_argument("walk breakpoints must be increasing");
    if (t == times_.back()) {
      // Zero-length segment: fold the second jump into the first.
      after_.back() = after;
      return;
    }
  }
  times_.push_back(t);
  before_.push_back(before);
  after_.push_back(after);
}

double WalkPath::value_at(double t) const {
  if (times_.empty()) throw std::logic_error("empty walk");
  if (t < times_.front()) return before_.front();
  if (t >= times_.back()) return after_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  if (t == times_[k]) return after_[k];
  const double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return after_[k] + s * (before_[k + 1] - after_[k]);
}

double WalkPath::left_limit(double t) const {
  if (times_.empty()) throw std::logic_error("empty walk");
  if (t <= times_.front()) return before_.front();
  if (t > times_.back()) return after_.back();
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin());
  if (times_[k] == t) return before_[k];
  const double s = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
  return after_[k - 1] + s * (before_[k] - after_[k - 1]);
}

WalkPath reflect(const WalkPath& walk) {
  WalkPath out;
  if (walk.empty()) return out;
  const auto& t = walk.times();
  const auto& bv = walk.before();
  const auto& av = walk.after();
  double m = bv[0];
  double left = 0.0;  // reflected left limit at t[k]
  for (std::size_t k = 0; k < t.size(); ++k) {
    m = std::min(m, av[k]);
    out.append(t[k], left, av[k] - m);
    if (k + 1 == t.size()) break;
    const double a = av[k], b = bv[k + 1];
    if (b < m) {
      if (a > m) {
        const double tc = t[k] + (a - m) / (a - b) * (t[k + 1] - t[k]);
        if (tc > t[k] && tc < t[k + 1]) out.append(tc, 0.0);
      }
      m = b;
      left = 0.0;
    } else {
      left = b - m;
    }
  }
  return out;
}

std::vector<ExcursionRecord> extract_excursions(const WalkPath& reflected,
                                                const std::vector<double>& marks) {
  std::vector<double> sorted(marks);
  std::sort(sorted.begin(), sorted.end());
  std::vector<ExcursionRecord> out;
  const auto& t = reflected.times();
  const auto& bv = reflected.before();
  const auto& av = reflected.after();
  bool open = false;
  double start = 0.0, area = 0.0;
  auto close = [&](double end) {
    open = false;
    if (!(end > start)) return;
    ExcursionRecord r;
    r.start = start;
    r.end = end;
    r.length = end - start;
    r.area = area;
    r.marks = static_cast<std::uint64_t>(
        std::lower_bound(sorted.begin(), sorted.end(), end) -
        std::lower_bound(sorted.begin(), sorted.end(), start));
    out.push_back(r);
  };
  auto begin = [&](double s) {
    open = true;
    start = s;
    area = 0.0;
  };
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (open && (bv[k] <= 0.0 || av[k] <= 0.0)) close(t[k]);
    if (!open && av[k] > 0.0) begin(t[k]);
    if (k + 1 == t.size()) break;
    const double a = av[k], b = bv[k + 1];
    if (!open && b > 0.0) begin(t[k]);
    if (open) area += 0.5 * (a + b) * (t[k + 1] - t[k]);
  }
  std::stable_sort(out.begin(), out.end(), [](const ExcursionRecord& x, const ExcursionRecord& y) {
    if (x.length != y.length) return x.length > y.length;
    return x.marks > y.marks;
  });
  return out;
}

double open_tail_length(const WalkPath& reflected) {
  if (reflected.empty() || reflected.after().back() <= 0.0) return 0.0;
  const auto& t = reflected.times();
  const auto& bv = reflected.before();
  const auto& av = reflected.after();
  for (std::size_t k = t.size(); k-- > 0;) {
    if (av[k] <= 0.0) return t.back() - t[k];
    if (bv[k] <= 0.0) return t.back() - t[k];
  }
  return t.back() - t.front();
}

BfsWalk bfs_walk_build(const std::vector<double>& masses, double q, Rng& rng) {
  if (masses.empty()) throw std::invalid_argument("masses must be nonempty");
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive");
  for (double x : masses)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("masses must be positive and finite");

  enum class Status : unsigned char { unseen, queued, explored };
  const std::size_t n = masses.size();
  std::vector<Status> status(n, Status::unseen);
  detail::MassIndex unseen(masses);
  double unseen_mass = 0.0;
  for (double x : masses) unseen_mass += x;

  std::deque<std::size_t> queue;
  double queue_mass = 0.0;

  BfsWalk out;
  std::vector<Block> blocks;
  double l = 0.0;    // start of the current vertex interval
  double z = 0.0;    // Z(l)
  double ze = 0.0;   // exploration walk at l, before any root jump
  struct Arrival {
    double tau;
    std::size_t j;
  };
  std::vector<Arrival> arrivals;

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t v;
    double root_jump = 0.0;
    if (queue.empty()) {
      v = unseen.find(rng.uniform() * unseen_mass);
      unseen.set(v, 0.0);
      unseen_mass -= masses[v];
      root_jump = masses[v];
      blocks.push_back({0.0, 0});
    } else {
      v = queue.front();
      queue.pop_front();
      queue_mass -= masses[v];
    }
    if (queue.empty()) queue_mass = 0.0;
    status[v] = Status::explored;
    const double xv = masses[v];
    Block& comp = blocks.back();
    comp.mass += xv;

    // Stage I: first arrivals from unseen vertices; repeats are stage-II edges.
    arrivals.clear();
    const std::size_t marks_before = out.marks.size();
    for (std::size_t j = 0; j < n; ++j) {
      if (status[j] != Status::unseen) continue;
      const std::uint64_t k = rng.poisson(q * masses[j] * xv);
      if (k == 0) continue;
      double first = xv * rng.uniform_open();
      for (std::uint64_t e = 1; e < k; ++e) {
        const double tau = xv * rng.uniform_open();
        out.marks.push_back(l + std::max(tau, first));
        first = std::min(first, tau);
      }
      arrivals.push_back({first, j});
    }
    // Stage II: self-loops and edges to vertices waiting in the queue.
    const std::uint64_t loops = rng.poisson(q * xv * xv / 2.0);
    for (std::uint64_t e = 0; e < loops; ++e) out.marks.push_back(l + xv * rng.uniform_open());
    for (std::size_t w : queue) {
      const std::uint64_t k = rng.poisson(q * masses[w] * xv);
      for (std::uint64_t e = 0; e < k; ++e) out.marks.push_back(l + xv * rng.uniform_open());
    }
    comp.surplus += out.marks.size() - marks_before;

    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
      return a.tau != b.tau ? a.tau < b.tau : a.j < b.j;
    });

    double rate = q * (xv / 2.0 + queue_mass);
    out.walk.append(l, z, z);
    out.exploration.append(l, ze, ze + root_jump);
    out.rate_times.push_back(l);
    out.rate_values.push_back(rate);
    const double base_e = ze + root_jump;
    double arrived = 0.0;
    for (const Arrival& a : arrivals) {
      const double x = masses[a.j];
      const double t = l + a.tau;
      out.walk.append(t, z + arrived - a.tau, z + arrived + x - a.tau);
      out.exploration.append(t, base_e + arrived - a.tau, base_e + arrived + x - a.tau);
      arrived += x;
      rate += q * x;
      out.rate_times.push_back(t);
      out.rate_values.push_back(rate);
      status[a.j] = Status::queued;
      unseen.set(a.j, 0.0);
      unseen_mass -= x;
      queue.push_back(a.j);
      queue_mass += x;
    }
    if (unseen_mass < 0.0) unseen_mass = 0.0;
    z += arrived - xv;
    ze = queue.empty() ? 0.0 : base_e + arrived - xv;
    l += xv;
  }
  out.walk.append(l, z, z);
  out.exploration.append(l, ze, ze);
  out.total_length = l;

  std::sort(out.marks.begin(), out.marks.end());
  out.order = blocks;
  out.components = AugmentedState(std::move(blocks));
  return out;
}

BfsWalk bfs_walk_build(const std::vector<double>& masses, double q, std::uint64_t seed) {
  Rng rng(seed);
  return bfs_walk_build(masses, q, rng);
}

namespace {

double step_value(const std::vector<double>& times, const std::vector<double>& values, double t,
                  bool left) {
  const auto it = left ? std::lower_bound(times.begin(), times.end(), t)
                       : std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

}  // namespace

double mark_rate_gap(const BfsWalk& w, double q) {
  const WalkPath hat = reflect(w.walk);
  std::vector<double> times(hat.times());
  times.insert(times.end(), w.rate_times.begin(), w.rate_times.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const double end = w.total_length;
  double gap = 0.0;
  for (double t : times) {
    if (t > 0.0) {
      const double r = step_value(w.rate_times, w.rate_values, t, true);
      gap = std::max(gap, std::fabs(r - q * hat.left_limit(t)));
    }
    if (t < end) {
      const double r = step_value(w.rate_times, w.rate_values, t, false);
      gap = std::max(gap, std::fabs(r - q * hat.value_at(t)));
    }
  }
  return gap;
}

std::optional<std::string> exploration_mismatch(const BfsWalk& w, double tol) {
  const std::vector<ExcursionRecord> ex = extract_excursions(reflect(w.exploration), w.marks);
  const AugmentedState& c = w.components;
  std::ostringstream msg;
  msg.precision(17);
  if (ex.size() != c.size()) {
    msg << "excursion count " << ex.size() << " != component count " << c.size();
    return msg.str();
  }
  std::vector<ExcursionRecord> by_start(ex);
  std::sort(by_start.begin(), by_start.end(),
            [](const ExcursionRecord& x, const ExcursionRecord& y) { return x.start < y.start; });
  for (std::size_t i = 0; i < by_start.size(); ++i) {
    const ExcursionRecord& e = by_start[i];
    const Block& blk = w.order[i];
    if (std::fabs(e.length - blk.mass) > tol) {
      msg << "excursion at " << e.start << " has length " << e.length << ", component volume "
          << blk.mass;
      return msg.str();
    }
    if (e.marks != blk.surplus) {
      msg << "excursion at " << e.start << " has " << e.marks << " marks, component surplus "
          << blk.surplus;
      return msg.str();
    }
  }
  return std::nullopt;
}

WalkDiagnostics walk_diagnostics(const std::vector<double>& masses, double q, double varsigma,
                                 std::uint64_t seed) {
  WalkDiagnostics d;
  for (double x : masses) {
    d.s1 += x;
    d.s2 += x * x;
    d.s3 += x * x * x;
    d.x_star = std::max(d.x_star, x);
  }
  const BfsWalk w = bfs_walk_build(masses, q, seed);
  d.q_minus_inv_s2 = q - 1.0 / d.s2;
  d.ratio_s3_s2cubed = d.s3 / (d.s2 * d.s2 * d.s2);
  d.x_star_over_s2 = d.x_star / d.s2;
  d.precondition_value = d.s1 * std::pow(d.x_star_over_s2, varsigma);
  d.rate_gap = mark_rate_gap(w, q);
  const double bound = 1.5 * q * d.x_star;
  d.r_bound_ok = d.rate_gap <= bound * (1.0 + 1e-12) + 1e-12;
  return d;
}

LimitSample sample_limit(double lambda, double step, double horizon, Rng& rng, double noise) {
  if (!(step > 0.0 && step <= 1e-2)) throw std::invalid_argument("step must lie in (0, 1e-2]");
  if (!(horizon >= std::max(10.0, 4.0 * std::fabs(lambda))))
    throw std::invalid_argument("horizon must be at least max(10, 4|lambda|)");
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / step));
  const double sd = std::sqrt(step) * noise;
  WalkPath path;
  double w = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * step;
    if (k > 0 && noise != 0.0) w += sd * rng.normal();
    path.append(t, w + lambda * t - 0.5 * t * t);
  }
  const WalkPath hat = reflect(path);
  LimitSample out;
  out.tail_length = open_tail_length(hat);
  for (const ExcursionRecord& e : extract_excursions(hat, {}))
    if (e.length >= 2.0 * step) out.excursions.push_back(e);
  for (ExcursionRecord& e : out.excursions) e.marks = rng.poisson(e.area);
  std::stable_sort(out.excursions.begin(), out.excursions.end(),
                   [](const ExcursionRecord& x, const ExcursionRecord& y) {
                     if (x.length != y.length) return x.length > y.length;
                     return x.marks > y.marks;
                   });
  std::vector<Block> blocks;
  for (const ExcursionRecord& e : out.excursions) blocks.push_back({e.length, e.marks});
  out.state = AugmentedState(std::move(blocks));
  return out;
}

LimitSample sample_limit(double lambda, double step, double horizon, std::uint64_t seed,
                         double noise) {
  Rng rng(seed);
  return sample_limit(lambda, step, horizon, rng, noise);
}

WalkInstance random_walk_instance(Rng& rng) {
  WalkInstance inst;
  const std::size_t count = 1 + rng.below(50);
  const bool heavy = rng.below(2) == 1;
  for (std::size_t i = 0; i < count; ++i)
    inst.masses.push_back(heavy ? 0.1 * std::pow(rng.uniform_open(), -1.0 / 1.5)
                                : 1.0 - rng.uniform());
  inst.q = 0.1 + 19.9 * rng.uniform();
  return inst;
}

WalkCheckReport run_walk_check(std::size_t instances, std::uint64_t seed) {
  WalkCheckReport rep;
  rep.instances = instances;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, "walk-check", i));
    WalkInstance inst = random_walk_instance(rng);
    const std::uint64_t build_seed = rng.next();
    const BfsWalk w = bfs_walk_build(inst.masses, inst.q, build_seed);
    double x_star = 0.0;
    for (double x : inst.masses) x_star = std::max(x_star, x);
    const double ratio = mark_rate_gap(w, inst.q) / (1.5 * inst.q * x_star);
    rep.worst_gap_ratio = std::max(rep.worst_gap_ratio, ratio);
    std::optional<std::string> reason = exploration_mismatch(w);
    if (reason) ++rep.consistency_failures;
    if (ratio > 1.0 + 1e-12) {
      ++rep.bound_violations;
      if (!reason) reason = "mark-rate bound exceeded by factor " + std::to_string(ratio);
    }
    if (reason && !rep.first_failure)
      rep.first_failure = WalkCheckFailure{i, std::move(inst), build_seed, *reason};
  }
  return rep;
}

}  // namespace critmc
