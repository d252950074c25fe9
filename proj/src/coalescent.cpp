#include "critmc/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detail/mass_index.hpp"

namespace critmc {

AugmentedState::AugmentedState(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  for (const Block& b : blocks_) {
    if (!(b.mass > 0.0) || !std::isfinite(b.mass))
      throw std::invalid_argument("block masses must be positive and finite");
  }
  std::stable_sort(blocks_.begin(), blocks_.end(), [](const Block& a, const Block& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.surplus > b.surplus;
  });
}

double AugmentedState::total_mass() const noexcept {
  double s = 0.0;
  for (const Block& b : blocks_) s += b.mass;
  return s;
}

double AugmentedState::sum_squares() const noexcept {
  double s = 0.0;
  for (const Block& b : blocks_) s += b.mass * b.mass;
  return s;
}

double AugmentedState::mass_surplus() const noexcept {
  double s = 0.0;
  for (const Block& b : blocks_) s += b.mass * double(b.surplus);
  return s;
}

std::uint64_t AugmentedState::total_surplus() const noexcept {
  std::uint64_t s = 0;
  for (const Block& b : blocks_) s += b.surplus;
  return s;
}

double d_U(const AugmentedState& a, const AugmentedState& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sq = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Block p = i < a.size() ? a[i] : Block{};
    const Block q = i < b.size() ? b[i] : Block{};
    sq += (p.mass - q.mass) * (p.mass - q.mass);
    l1 += std::fabs(p.mass * double(p.surplus) - q.mass * double(q.surplus));
  }
  return std::sqrt(sq) + l1;
}

using detail::MassIndex;

AugmentedState amc_run(const AugmentedState& z, double duration, Rng& rng) {
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be nonnegative");
  if (z.empty()) return z;
  std::vector<double> mass;
  std::vector<std::uint64_t> surplus;
  for (const Block& b : z.blocks()) {
    mass.push_back(b.mass);
    surplus.push_back(b.surplus);
  }
  // Σ_{i<j} x_i x_j + Σ_i x_i²/2 = (Σ x_i)²/2, invariant under merges.
  const double total = z.total_mass();
  const double rate = 0.5 * total * total;
  MassIndex index(mass);
  double t = rng.exponential(rate);
  while (t <= duration) {
    // Ordered pair (i, j) with probability x_i x_j / total²; i = j is a
    // surplus event, which then has rate x_i²/2.
    const std::size_t i = index.find(rng.uniform() * total);
    const std::size_t j = index.find(rng.uniform() * total);
    if (i == j) {
      ++surplus[i];
    } else {
      const std::size_t keep = std::min(i, j), drop = std::max(i, j);
      mass[keep] += mass[drop];
      surplus[keep] += surplus[drop];
      mass[drop] = 0.0;
      surplus[drop] = 0;
      index.set(keep, mass[keep]);
      index.set(drop, 0.0);
    }
    t += rng.exponential(rate);
  }
  std::vector<Block> out;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0.0) out.push_back({mass[i], surplus[i]});
  return AugmentedState(std::move(out));
}

AugmentedState amc_run(const AugmentedState& z, double duration, std::uint64_t seed) {
  Rng rng(seed);
  return amc_run(z, duration, rng);
}

AugmentedState graphical_construction(const AugmentedState& z, double t, Rng& rng) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
  const std::size_t n = z.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<std::uint64_t> edges(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = z[i].mass;
    edges[find(i)] += rng.poisson(t * xi * xi / 2.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint64_t k = rng.poisson(t * xi * z[j].mass);
      if (k == 0) continue;
      const std::size_t ri = find(i), rj = find(j);
      if (ri == rj) {
        edges[ri] += k;
      } else {
        parent[rj] = ri;
        edges[ri] += edges[rj] + k;
        edges[rj] = 0;
      }
    }
  }
  std::vector<double> mass(n, 0.0);
  std::vector<std::uint64_t> initial(n, 0), members(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    mass[r] += z[i].mass;
    initial[r] += z[i].surplus;
    ++members[r];
  }
  std::vector<Block> out;
  for (std::size_t r = 0; r < n; ++r) {
    if (members[r] == 0) continue;
    out.push_back({mass[r], initial[r] + edges[r] - (members[r] - 1)});
  }
  return AugmentedState(std::move(out));
}

AugmentedState graphical_construction(const AugmentedState& z, double t, std::uint64_t seed) {
  Rng rng(seed);
  return graphical_construction(z, t, rng);
}

AugmentedState parse_state_csv(std::string_view text) {
  std::vector<Block> blocks;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("state line " + std::to_string(line_no) +
                                  ": expected mass,surplus");
    try {
      std::size_t used = 0;
      const double mass = std::stod(line.substr(0, comma), &used);
      const std::string rest = line.substr(comma + 1);
      const long long s = std::stoll(rest);
      if (s < 0) throw std::invalid_argument("negative surplus");
      blocks.push_back({mass, static_cast<std::uint64_t>(s)});
    } catch (const std::exception&) {
      throw std::invalid_argument("state line " + std::to_string(line_no) +
                                  ": expected mass,surplus");
    }
  }
  return AugmentedState(std::move(blocks));
}

}  // namespace critmc
