#pragma once

#include <cstddef>
#include <vector>

namespace critmc::detail {

/// Fenwick tree over nonnegative weights for sampling an index with
/// probability proportional to its weight.
class MassIndex {
 public:
  explicit MassIndex(const std::vector<double>& w) : tree_(w.size() + 1, 0.0), weight_(w) {
    for (std::size_t i = 0; i < w.size(); ++i) add(i, w[i]);
    while (step_ * 2 <= w.size()) step_ *= 2;
  }

  void set(std::size_t i, double value) {
    add(i, value - weight_[i]);
    weight_[i] = value;
  }

  double weight(std::size_t i) const { return weight_[i]; }

  /// Index whose cumulative interval contains u ∈ [0, total).
  std::size_t find(double u) const {
    std::size_t pos = 0;
    for (std::size_t s = step_; s > 0; s /= 2) {
      if (pos + s < tree_.size() && tree_[pos + s] <= u) {
        pos += s;
        u -= tree_[pos];
      }
    }
    // Rounding can land on an emptied slot or run off the end.
    std::size_t i = pos < weight_.size() ? pos : weight_.size() - 1;
    while (weight_[i] == 0.0 && i + 1 < weight_.size()) ++i;
    while (weight_[i] == 0.0 && i > 0) --i;
    return i;
  }

 private:
  void add(std::size_t i, double delta) {
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }
  std::vector<double> tree_;
  std::vector<double> weight_;
  std::size_t step_ = 1;
};

}  // namespace critmc::detail
