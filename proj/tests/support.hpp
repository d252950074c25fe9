#pragma once

#include <vector>

#include "critmc/random.hpp"
#include "critmc/rules.hpp"

namespace critmc::test {

/// Rule on bound K containing each quadruple independently with probability p.
inline BoundedSizeRule random_rule(std::uint32_t bound, double p, Rng& rng) {
  const std::vector<RuleType> types = all_types(bound);
  std::vector<Quadruple> quads;
  for (RuleType a : types)
    for (RuleType b : types)
      for (RuleType c : types)
        for (RuleType d : types)
          if (rng.uniform() < p) quads.push_back({a, b, c, d});
  return BoundedSizeRule(bound, quads);
}

}  // namespace critmc::test
