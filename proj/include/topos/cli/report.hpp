#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace topos::cli {

enum class Format { Text, Json };

/// Result of one subcommand. Byte-identical for identical inputs unless timing is on.
struct Report {
  explicit Report(std::string name = {}) : command(std::move(name)) {}

  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // document name, digest
  bool pass = false;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::vector<std::string> witnesses;
  std::optional<double> milliseconds;
};

std::string render(const Report& report, Format format);

}  // namespace topos::cli
