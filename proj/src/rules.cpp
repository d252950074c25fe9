#include "critmc/rules.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "critmc/random.hpp"

namespace critmc {

RuleParseError::RuleParseError(std::string kind, std::size_t line)
    : std::runtime_error(kind + " at line " + std::to_string(line)),
      kind_(std::move(kind)),
      line_(line) {}

BoundedSizeRule::BoundedSizeRule(std::uint32_t bound, std::span<const Quadruple> quadruples)
    : bound_(bound), base_(std::size_t{bound} + 2) {
  if (bound > kMaxBound)
    throw std::invalid_argument("rule bound K=" + std::to_string(bound) + " exceeds " +
                                std::to_string(kMaxBound));
  member_.assign(base_ * base_ * base_ * base_, 0);
  for (const Quadruple& q : quadruples) {
    for (const RuleType& t : q) {
      if (!is_valid(t)) throw std::invalid_argument("quadruple coordinate out of range for K");
    }
    member_[encode(q)] = 1;
  }
  quads_.assign(quadruples.begin(), quadruples.end());
  std::sort(quads_.begin(), quads_.end());
  quads_.erase(std::unique(quads_.begin(), quads_.end()), quads_.end());
}

namespace {

void append_type(std::string& out, RuleType t) {
  if (t.is_large())
    out += '*';
  else
    out += std::to_string(t.size());
}

}  // namespace

std::string BoundedSizeRule::serialize() const {
  std::string out = "K=" + std::to_string(bound_) + "\n";
  for (const Quadruple& q : quads_) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (i) out += ' ';
      append_type(out, q[i]);
    }
    out += '\n';
  }
  return out;
}

std::string BoundedSizeRule::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

std::vector<RuleType> all_types(std::uint32_t bound) {
  std::vector<RuleType> types;
  types.reserve(bound + 1);
  for (std::uint32_t i = 1; i <= bound; ++i) types.push_back(RuleType::small(i));
  types.push_back(RuleType::large());
  return types;
}

BoundedSizeRule builtin_rule(std::string_view name) {
  if (name == "erdos-renyi") {
    const Quadruple q{RuleType::large(), RuleType::large(), RuleType::large(), RuleType::large()};
    return BoundedSizeRule(0, std::span(&q, 1));
  }
  if (name == "bohman-frieze") {
    std::vector<Quadruple> f;
    for (RuleType a : all_types(1))
      for (RuleType b : all_types(1)) f.push_back({RuleType::small(1), RuleType::small(1), a, b});
    return BoundedSizeRule(1, f);
  }
  throw UnknownRuleError("unknown rule '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool parse_uint(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

BoundedSizeRule parse_rule(std::string_view text) {
  std::optional<std::uint32_t> bound;
  std::vector<Quadruple> quads;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!bound) {
      std::uint64_t k = 0;
      if (tokens.size() != 1 || tokens[0].substr(0, 2) != "K=" ||
          !parse_uint(tokens[0].substr(2), k) || k > BoundedSizeRule::kMaxBound)
        throw RuleParseError("malformed header", line_no);
      bound = static_cast<std::uint32_t>(k);
    } else {
      if (tokens.size() != 4) throw RuleParseError("wrong arity", line_no);
      Quadruple q{RuleType::large(), RuleType::large(), RuleType::large(), RuleType::large()};
      for (std::size_t i = 0; i < 4; ++i) {
        if (tokens[i] == "*") continue;
        std::uint64_t v = 0;
        if (!parse_uint(tokens[i], v)) throw RuleParseError("malformed token", line_no);
        if (v < 1 || v > *bound) throw RuleParseError("token out of range", line_no);
        q[i] = RuleType::small(static_cast<std::uint32_t>(v));
      }
      quads.push_back(q);
    }
    if (end == text.size()) break;
  }
  if (!bound) throw RuleParseError("malformed header", line_no == 0 ? 1 : line_no);
  return BoundedSizeRule(*bound, quads);
}

BoundedSizeRule load_rule(std::string_view name_or_path) {
  if (name_or_path == "erdos-renyi" || name_or_path == "bohman-frieze")
    return builtin_rule(name_or_path);
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw UnknownRuleError("unknown rule '" + std::string(name_or_path) + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rule(ss.str());
}

}  // namespace critmc
