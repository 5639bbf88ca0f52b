#include "topos/cli/report.hpp"

#include <cstdio>

namespace topos::cli {

namespace {

std::string text_value(const nlohmann::ordered_json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

std::string render(const Report& report, Format format) {
  if (format == Format::Json) {
    nlohmann::ordered_json out;
    out["command"] = report.command;
    out["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [name, digest] : report.inputs) out["inputs"].push_back({{"name", name}, {"digest", digest}});
    out["verdict"] = report.pass ? "pass" : "fail";
    out["details"] = report.details;
    out["witnesses"] = report.witnesses;
    out["timing"] = nullptr;
    if (report.milliseconds) out["timing"] = {{"milliseconds", *report.milliseconds}};
    return out.dump(2) + "\n";
  }
  std::string text = report.command + ": " + (report.pass ? "pass" : "fail") + "\n";
  for (const auto& [name, digest] : report.inputs) text += "  input " + name + " " + digest + "\n";
  for (const auto& [key, value] : report.details.items()) {
    if (value.is_object()) {
      text += "  " + key + ":\n";
      for (const auto& [k, v] : value.items()) text += "    " + k + ": " + text_value(v) + "\n";
    } else {
      text += "  " + key + ": " + text_value(value) + "\n";
    }
  }
  for (const auto& w : report.witnesses) text += "  witness: " + w + "\n";
  if (report.milliseconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *report.milliseconds);
    text += std::string("  timing: ") + buf + " ms\n";
  }
  return text;
}

}  // namespace topos::cli
