#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace critmc::cli {

std::string sha256_hex(std::string_view data);

struct OutputFile {
  std::string path;  // "-" for stdout
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<OutputFile> outputs;
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
};

}  // namespace critmc::cli
