#pragma once

#include <string>

#include <json.hpp>

namespace mrw {

// Fully resolved run configuration; every artifact embeds one of these so a
// run can be reproduced from its outputs alone.
struct RunConfig {
  nlohmann::json values = nlohmann::json::object();

  std::string serialize() const { return values.dump(); }
  static RunConfig parse(const std::string& text) { return RunConfig{nlohmann::json::parse(text)}; }
  bool operator==(const RunConfig& other) const = default;
};

}  // namespace mrw
