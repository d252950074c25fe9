#include "critmc/graph_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "critmc/fluid.hpp"

namespace critmc {

namespace {

bool size_surplus_before(const SizeSurplus& a, const SizeSurplus& b) {
  if (a.size != b.size) return a.size > b.size;
  return a.surplus > b.surplus;
}

WideCount cube(std::uint64_t v) { return WideCount(v) * v * v; }

}  // namespace

void sort_components(std::vector<SizeSurplus>& components) {
  std::sort(components.begin(), components.end(), size_surplus_before);
}

ComponentLedger::ComponentLedger(std::uint32_t n, std::uint32_t bound)
    : n_(n),
      bound_(bound),
      parent_(n),
      size_(n, 1),
      surplus_(n, 0),
      type_counts_(std::size_t{bound} + 1, 0),
      s2_(n),
      s3_(n),
      components_(n) {
  if (n == 0) throw std::invalid_argument("vertex count must be positive");
  for (std::uint32_t v = 0; v < n; ++v) parent_[v] = v;
  // Singletons: type 1, or large when K = 0; both live in slot 0.
  type_counts_[0] = n;
}

void ComponentLedger::add_edge(std::uint32_t u, std::uint32_t v) noexcept {
  std::uint32_t ru = find(u);
  std::uint32_t rv = find(v);
  ++edges_;
  if (ru == rv) {
    ++surplus_[ru];
    mass_surplus_ += size_[ru];
    return;
  }
  if (size_[ru] < size_[rv]) std::swap(ru, rv);
  const std::uint64_t a = size_[ru];
  const std::uint64_t b = size_[rv];
  const std::uint64_t merged = a + b;
  auto slot = [this](std::uint64_t s) -> std::uint64_t& {
    return type_counts_[s <= bound_ ? s - 1 : bound_];
  };
  slot(a) -= a;
  slot(b) -= b;
  slot(merged) += merged;
  s2_ += WideCount(2) * a * b;
  s3_ += WideCount(3) * a * b * merged;
  mass_surplus_ += a * surplus_[rv] + b * surplus_[ru];
  parent_[rv] = ru;
  size_[ru] = merged;
  surplus_[ru] += surplus_[rv];
  --components_;
  largest_ = std::max(largest_, merged);
}

std::vector<SizeSurplus> ComponentLedger::components() const {
  std::vector<SizeSurplus> out;
  out.reserve(components_);
  for (std::uint32_t v = 0; v < n_; ++v) {
    if (parent_[v] == v) out.push_back({size_[v], surplus_[v]});
  }
  return out;
}

bool ComponentLedger::verify() const {
  std::vector<std::uint64_t> counted(n_, 0);
  for (std::uint32_t v = 0; v < n_; ++v) {
    std::uint32_t r = v;
    while (parent_[r] != r) r = parent_[r];
    ++counted[r];
  }
  WideCount s2 = 0, s3 = 0;
  std::uint64_t roots = 0, largest = 0, surplus_total = 0, mass_surplus = 0;
  std::vector<std::uint64_t> types(type_counts_.size(), 0);
  for (std::uint32_t v = 0; v < n_; ++v) {
    if (parent_[v] != v) continue;
    if (counted[v] != size_[v]) return false;
    const std::uint64_t s = size_[v];
    ++roots;
    s2 += WideCount(s) * s;
    s3 += cube(s);
    largest = std::max(largest, s);
    surplus_total += surplus_[v];
    mass_surplus += s * surplus_[v];
    types[s <= bound_ ? s - 1 : bound_] += s;
  }
  std::uint64_t type_total = 0;
  for (auto c : types) type_total += c;
  return s2 == s2_ && s3 == s3_ && roots == components_ && largest == largest_ &&
         surplus_total == edges_ - (n_ - components_) && mass_surplus == mass_surplus_ &&
         types == type_counts_ && type_total == n_;
}

BsrProcess::BsrProcess(BoundedSizeRule rule, std::uint32_t n, std::uint64_t seed)
    : rule_(std::move(rule)),
      ledger_(n, rule_.bound()),
      rng_(seed),
      rate_(0.5 * n),
      next_event_(0.0) {
  next_event_ = rng_.exponential(rate_);
}

void BsrProcess::apply(const std::array<std::uint32_t, 4>& v) noexcept {
  std::size_t code = 0;
  for (std::size_t i = 0; i < 4; ++i)
    code = code * (rule_.bound() + 2) + rule_.digit(ledger_.type_of_root(ledger_.find(v[i])));
  if (rule_.contains_code(code))
    ledger_.add_edge(v[0], v[1]);
  else
    ledger_.add_edge(v[2], v[3]);
  ++events_;
}

double BsrProcess::step() {
  t_ = next_event_;
  const std::uint64_t n = ledger_.vertex_count();
  std::array<std::uint32_t, 4> v;
  for (auto& x : v) x = static_cast<std::uint32_t>(rng_.below(n));
  apply(v);
  next_event_ = t_ + rng_.exponential(rate_);
  return t_;
}

void BsrProcess::advance_to(double t_target) {
  if (!(t_target >= t_))
    throw std::invalid_argument("advance_to: target time precedes current time");
  while (next_event_ <= t_target) step();
  t_ = t_target;
}

ComponentStats BsrProcess::snapshot() const {
  return snapshot(static_cast<std::size_t>(ledger_.component_count()));
}

ComponentStats BsrProcess::snapshot(std::size_t top_k) const {
  ComponentStats stats;
  stats.components = ledger_.components();
  const std::size_t k = std::min(top_k, stats.components.size());
  std::partial_sort(stats.components.begin(), stats.components.begin() + k,
                    stats.components.end(), size_surplus_before);
  stats.components.resize(k);
  stats.s2bar = ledger_.s2bar();
  stats.s3bar = ledger_.s3bar();
  stats.largest = ledger_.largest();
  stats.t = t_;
  stats.n = ledger_.vertex_count();
  stats.edges = ledger_.edge_count();
  stats.component_count = ledger_.component_count();
  stats.mass_surplus = ledger_.mass_surplus();
  return stats;
}

double window_time(const CriticalConstants& c, std::uint32_t n, double lambda) {
  return c.t_c + c.alpha * std::pow(c.beta, 2.0 / 3.0) * lambda / std::cbrt(double(n));
}

RescaledRecord rescale(const ComponentStats& stats, const CriticalConstants& c,
                       std::size_t top_k) {
  const double n = stats.n;
  RescaledRecord rec;
  rec.lambda = (stats.t - c.t_c) * std::cbrt(n) / (c.alpha * std::pow(c.beta, 2.0 / 3.0));
  const double scale = std::cbrt(c.beta) / std::pow(n, 2.0 / 3.0);
  const std::size_t k = std::min(top_k, stats.components.size());
  rec.top.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    rec.top.push_back({scale * double(stats.components[i].size), stats.components[i].surplus});
  rec.weighted_surplus = scale * double(stats.mass_surplus);
  return rec;
}

}  // namespace critmc
