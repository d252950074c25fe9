#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "critmc/random.hpp"
#include "critmc/rules.hpp"

namespace critmc {

struct CriticalConstants;

/// Wide accumulator for the susceptibility sums; S_3 reaches n^3.
using WideCount = unsigned __int128;

struct SizeSurplus {
  std::uint64_t size = 0;
  std::uint64_t surplus = 0;
  bool operator==(const SizeSurplus&) const = default;
};

/// Size-descending, ties by larger surplus first.
void sort_components(std::vector<SizeSurplus>& components);

/// Disjoint-set forest over n vertices with per-root size and surplus, type
/// counts for a bound K, and incrementally maintained S_2, S_3.
class ComponentLedger {
 public:
  ComponentLedger(std::uint32_t n, std::uint32_t bound);

  std::uint32_t find(std::uint32_t v) noexcept {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  RuleType type_of_root(std::uint32_t root) const noexcept { return classify(size_[root], bound_); }

  /// Adds one (multi)edge; self-loops and intra-component edges raise surplus.
  void add_edge(std::uint32_t u, std::uint32_t v) noexcept;

  std::uint32_t vertex_count() const noexcept { return n_; }
  std::uint32_t bound() const noexcept { return bound_; }
  std::uint64_t edge_count() const noexcept { return edges_; }
  std::uint64_t component_count() const noexcept { return components_; }
  std::uint64_t largest() const noexcept { return largest_; }
  WideCount s2() const noexcept { return s2_; }
  WideCount s3() const noexcept { return s3_; }
  /// Σ over roots of size · surplus.
  std::uint64_t mass_surplus() const noexcept { return mass_surplus_; }
  double s2bar() const noexcept { return static_cast<double>(s2_) / n_; }
  double s3bar() const noexcept { return static_cast<double>(s3_) / n_; }

  /// Vertex count in components of exact size i (1 ≤ i ≤ K).
  std::uint64_t type_count(std::uint32_t i) const noexcept { return type_counts_[i - 1]; }
  std::uint64_t large_count() const noexcept { return type_counts_[bound_]; }

  bool is_root(std::uint32_t v) const noexcept { return parent_[v] == v; }
  std::uint64_t root_size(std::uint32_t r) const noexcept { return size_[r]; }
  std::uint64_t root_surplus(std::uint32_t r) const noexcept { return surplus_[r]; }

  /// Unsorted (size, surplus) of every component.
  std::vector<SizeSurplus> components() const;

  /// Recomputes every tracked quantity from the forest; false on mismatch.
  bool verify() const;

 private:
  std::uint32_t n_;
  std::uint32_t bound_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint64_t> size_;
  std::vector<std::uint64_t> surplus_;
  std::vector<std::uint64_t> type_counts_;
  WideCount s2_;
  WideCount s3_;
  std::uint64_t largest_ = 1;
  std::uint64_t edges_ = 0;
  std::uint64_t components_;
  std::uint64_t mass_surplus_ = 0;
};

struct ComponentStats {
  std::vector<SizeSurplus> components;  // sorted; possibly truncated
  double s2bar = 0.0;
  double s3bar = 0.0;
  std::uint64_t largest = 0;
  double t = 0.0;
  std::uint32_t n = 0;
  std::uint64_t edges = 0;
  std::uint64_t component_count = 0;
  std::uint64_t mass_surplus = 0;
};

/// Continuous-time bounded-size-rule process: events at rate n/2, each
/// drawing four vertices uniformly with replacement.
class BsrProcess {
 public:
  BsrProcess(BoundedSizeRule rule, std::uint32_t n, std::uint64_t seed);

  /// Runs every event with time ≤ t_target. The pending event clock is kept,
  /// so advance_to(a); advance_to(b) equals advance_to(b).
  void advance_to(double t_target);

  /// Performs exactly the next event and returns its time.
  double step();

  /// Applies the rule to a given quadruple of vertices (no clock change).
  void apply(const std::array<std::uint32_t, 4>& v) noexcept;

  ComponentStats snapshot() const;
  /// Snapshot keeping only the top_k largest components in the list.
  ComponentStats snapshot(std::size_t top_k) const;

  double time() const noexcept { return t_; }
  std::uint64_t events() const noexcept { return events_; }
  const ComponentLedger& ledger() const noexcept { return ledger_; }
  const BoundedSizeRule& rule() const noexcept { return rule_; }

 private:
  BoundedSizeRule rule_;
  ComponentLedger ledger_;
  Rng rng_;
  double rate_;
  double t_ = 0.0;
  double next_event_;
  std::uint64_t events_ = 0;
};

struct RescaledComponent {
  double size = 0.0;          // β^{1/3} n^{-2/3} |C_i|
  std::uint64_t surplus = 0;  // unscaled
};

struct RescaledRecord {
  double lambda = 0.0;
  std::vector<RescaledComponent> top;
  double weighted_surplus = 0.0;  // Σ_i C̄_i Ȳ_i over all components
};

/// Critical-window coordinates of a snapshot.
RescaledRecord rescale(const ComponentStats& stats, const CriticalConstants& constants,
                       std::size_t top_k);

/// λ ↦ t_c + α β^{2/3} λ n^{-1/3}.
double window_time(const CriticalConstants& constants, std::uint32_t n, double lambda);

}  // namespace critmc
