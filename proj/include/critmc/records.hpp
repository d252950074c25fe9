#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critmc/experiments.hpp"

namespace critmc {

/// Column layouts. Frozen: downstream scripts index by name and position.
///   snapshot: replicate,t,lambda,rank,size,surplus,s2bar,s3bar
///   window:   replicate,lambda,rank,size,surplus,weighted_sum
///   limit:    replicate,lambda,rank,length,marks,area,weighted_sum
enum class Schema { window, limit };
enum class Format { csv, jsonl };

Format parse_format(std::string_view name);

/// Shortest text that reads back to the same double ("nan" for NaN).
std::string format_double(double v);

void write_snapshots(std::ostream& os, const std::vector<SnapshotRecord>& records, Format format);
void write_scaled(std::ostream& os, const std::vector<ScaledRecord>& records, Schema schema,
                  Format format);

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads window- or limit-schema records in either format (detected from the
/// first nonblank character). Throws RecordError on malformed input.
std::vector<ScaledRecord> read_scaled(std::istream& is);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys accepted in configuration files.
const std::set<std::string>& config_keys();

/// `key = value` lines; `#` starts a comment. Unknown or repeated keys and
/// lines without `=` are errors.
std::map<std::string, std::string> parse_config(std::string_view text);

/// Comma-separated list of doubles.
std::vector<double> parse_double_list(std::string_view text);

}  // namespace critmc
