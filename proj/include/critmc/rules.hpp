#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace critmc {

/// Component type as seen by a bounded-size rule: an exact size in [1, K],
/// or "large" for any component bigger than K.
class RuleType {
 public:
  static constexpr RuleType large() noexcept { return RuleType(kLarge); }
  static constexpr RuleType small(std::uint32_t size) noexcept { return RuleType(size); }

  constexpr bool is_large() const noexcept { return value_ == kLarge; }
  /// Exact component size; only meaningful when !is_large().
  constexpr std::uint32_t size() const noexcept { return value_; }

  /// Integers order before large.
  constexpr std::strong_ordering operator<=>(const RuleType& other) const noexcept {
    return ordinal() <=> other.ordinal();
  }
  constexpr bool operator==(const RuleType&) const noexcept = default;

 private:
  static constexpr std::uint32_t kLarge = 0;
  constexpr explicit RuleType(std::uint32_t v) noexcept : value_(v) {}
  constexpr std::uint64_t ordinal() const noexcept {
    return is_large() ? std::uint64_t{1} << 32 : value_;
  }
  std::uint32_t value_;
};

using Quadruple = std::array<RuleType, 4>;

enum class EdgeChoice { first, second };

/// Error raised by parse_rule; carries the offending 1-based line number.
class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(std::string kind, std::size_t line);
  const std::string& kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string kind_;
  std::size_t line_;
};

/// Raised for a rule name that is neither builtin nor a readable file.
class UnknownRuleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BoundedSizeRule {
 public:
  /// Largest supported K; the membership table has (K+2)^4 entries.
  static constexpr std::uint32_t kMaxBound = 30;

  /// Throws std::invalid_argument when K is too large or a coordinate is not
  /// a valid type for K. Duplicate quadruples are merged.
  BoundedSizeRule(std::uint32_t bound, std::span<const Quadruple> quadruples);

  std::uint32_t bound() const noexcept { return bound_; }

  /// Canonically ordered, duplicate-free member quadruples.
  const std::vector<Quadruple>& quadruples() const noexcept { return quads_; }

  bool is_valid(RuleType t) const noexcept {
    return t.is_large() || (t.size() >= 1 && t.size() <= bound_);
  }

  /// Base-(K+2) code of a quadruple: digit i for size i, K+1 for large.
  std::size_t encode(const Quadruple& q) const noexcept {
    std::size_t code = 0;
    for (const RuleType& t : q) code = code * base_ + digit(t);
    return code;
  }
  std::size_t digit(RuleType t) const noexcept {
    return t.is_large() ? bound_ + 1 : t.size();
  }

  bool contains_code(std::size_t code) const noexcept { return member_[code] != 0; }
  bool contains(const Quadruple& q) const noexcept { return contains_code(encode(q)); }

  /// `K=<int>` followed by one quadruple per line, `*` for large.
  std::string serialize() const;

  /// Short hex digest of the canonical serialization.
  std::string fingerprint() const;

  bool operator==(const BoundedSizeRule& other) const {
    return bound_ == other.bound_ && quads_ == other.quads_;
  }

 private:
  std::uint32_t bound_;
  std::size_t base_;
  std::vector<Quadruple> quads_;
  std::vector<std::uint8_t> member_;
};

/// Type of a component of the given size under bound K.
constexpr RuleType classify(std::uint64_t component_size, std::uint32_t bound) noexcept {
  return component_size <= bound ? RuleType::small(static_cast<std::uint32_t>(component_size))
                                 : RuleType::large();
}

/// "erdos-renyi" or "bohman-frieze"; throws UnknownRuleError otherwise.
BoundedSizeRule builtin_rule(std::string_view name);

BoundedSizeRule parse_rule(std::string_view text);

/// Builtin name or path to a rule file.
BoundedSizeRule load_rule(std::string_view name_or_path);

inline EdgeChoice decide(const BoundedSizeRule& rule, const Quadruple& types) noexcept {
  return rule.contains(types) ? EdgeChoice::first : EdgeChoice::second;
}

/// All types valid for bound K in canonical order (1..K, then large).
std::vector<RuleType> all_types(std::uint32_t bound);

}  // namespace critmc
