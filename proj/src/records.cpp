#include "critmc/records.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace critmc {

using nlohmann::json;

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (csv or jsonl)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

const char* kSnapshotHeader = "replicate,t,lambda,rank,size,surplus,s2bar,s3bar";
const char* kWindowHeader = "replicate,lambda,rank,size,surplus,weighted_sum";
const char* kLimitHeader = "replicate,lambda,rank,length,marks,area,weighted_sum";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s, std::size_t line) {
  if (s == "nan") return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw RecordError("line " + std::to_string(line) + ": bad number '" + s + "'");
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw RecordError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

void write_snapshots(std::ostream& os, const std::vector<SnapshotRecord>& records, Format format) {
  if (format == Format::csv) {
    os << kSnapshotHeader << '\n';
    for (const auto& r : records)
      os << r.replicate << ',' << format_double(r.t) << ',' << format_double(r.lambda) << ','
         << r.rank << ',' << r.size << ',' << r.surplus << ',' << format_double(r.s2bar) << ','
         << format_double(r.s3bar) << '\n';
    return;
  }
  for (const auto& r : records) {
    json j;
    j["replicate"] = r.replicate;
    j["t"] = r.t;
    j["lambda"] = number_or_null(r.lambda);
    j["rank"] = r.rank;
    j["size"] = r.size;
    j["surplus"] = r.surplus;
    j["s2bar"] = r.s2bar;
    j["s3bar"] = r.s3bar;
    os << j.dump() << '\n';
  }
}

void write_scaled(std::ostream& os, const std::vector<ScaledRecord>& records, Schema schema,
                  Format format) {
  const bool limit = schema == Schema::limit;
  if (format == Format::csv) {
    os << (limit ? kLimitHeader : kWindowHeader) << '\n';
    for (const auto& r : records) {
      os << r.replicate << ',' << format_double(r.lambda) << ',' << r.rank << ','
         << format_double(r.size) << ',' << r.surplus << ',';
      if (limit) os << format_double(r.area) << ',';
      os << format_double(r.weighted_sum) << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    json j;
    j["replicate"] = r.replicate;
    j["lambda"] = r.lambda;
    j["rank"] = r.rank;
    j[limit ? "length" : "size"] = r.size;
    j[limit ? "marks" : "surplus"] = r.surplus;
    if (limit) j["area"] = number_or_null(r.area);
    j["weighted_sum"] = r.weighted_sum;
    os << j.dump() << '\n';
  }
}

std::vector<ScaledRecord> read_scaled(std::istream& is) {
  std::vector<ScaledRecord> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false, jsonl = false, limit = false;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (t.front() == '{') {
        jsonl = true;
      } else if (t == kWindowHeader) {
        continue;
      } else if (t == kLimitHeader) {
        limit = true;
        continue;
      } else {
        throw RecordError("line " + std::to_string(line_no) + ": unrecognized header '" + t + "'");
      }
    }
    ScaledRecord r;
    if (jsonl) {
      try {
        const json j = json::parse(t);
        const bool lim = j.contains("length");
        r.replicate = j.at("replicate").get<std::uint64_t>();
        r.lambda = j.at("lambda").get<double>();
        r.rank = j.at("rank").get<std::uint32_t>();
        r.size = j.at(lim ? "length" : "size").get<double>();
        r.surplus = j.at(lim ? "marks" : "surplus").get<std::uint64_t>();
        if (lim && !j.at("area").is_null()) r.area = j.at("area").get<double>();
        r.weighted_sum = j.at("weighted_sum").get<double>();
      } catch (const json::exception& e) {
        throw RecordError("line " + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      const auto cells = split(t, ',');
      if (cells.size() != (limit ? 7u : 6u))
        throw RecordError("line " + std::to_string(line_no) + ": wrong column count");
      std::size_t c = 0;
      r.replicate = to_uint(cells[c++], line_no);
      r.lambda = to_double(cells[c++], line_no);
      r.rank = static_cast<std::uint32_t>(to_uint(cells[c++], line_no));
      r.size = to_double(cells[c++], line_no);
      r.surplus = to_uint(cells[c++], line_no);
      if (limit) r.area = to_double(cells[c++], line_no);
      r.weighted_sum = to_double(cells[c++], line_no);
    }
    out.push_back(r);
  }
  return out;
}

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "rule",      "n",       "gamma", "lambda",     "replicates", "top_k",
      "seed",      "tol",     "step",  "horizon",    "checkpoints", "grid_points",
      "t",         "format",  "mode",  "instances",  "bound",      "alpha"};
  return keys;
}

std::map<std::string, std::string> parse_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!config_keys().count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (out.count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    out[key] = value;
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const std::string& cell : split(std::string(text), ',')) {
    const std::string c = trim(cell);
    if (c.empty()) throw std::invalid_argument("empty entry in list '" + std::string(text) + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(c, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != c.size()) throw std::invalid_argument("bad number '" + c + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace critmc
