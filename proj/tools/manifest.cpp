#include "manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <stdexcept>

namespace critmc::cli {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "critmc";
  j["version"] = CRITMC_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["timing"] = {{"seconds", seconds}};
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : outputs)
    j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  j["summary"] = summary;
  return j;
}

}  // namespace critmc::cli
