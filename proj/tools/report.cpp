#include "report.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "torsoseg/errors.hpp"

namespace torsoseg::cli {

Json report_header(const CLI::App& sub, const LabelSchema* schema) {
  Json j;
  j["tool"] = {{"name", "torsoseg"}, {"version", TORSOSEG_VERSION}};
  if (schema) j["catalog"] = {{"name", schema->name()}, {"version", schema->version()}};
  else j["catalog"] = nullptr;

  Json config = Json::object();
  std::istringstream lines(sub.get_parent()->config_to_str(true, false));
  std::string line;
  std::string section;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    if (!section.empty()) key = section + "." + key;
    const auto prefix = sub.get_name() + ".";
    if (key.find('.') != std::string::npos && key.rfind(prefix, 0) != 0) continue;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    config[key] = value;
  }
  j["command"] = sub.get_name();
  j["config"] = std::move(config);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

void warn_all(const std::vector<std::string>& messages) {
  for (const auto& m : messages) warn(m);
}

}  // namespace torsoseg::cli
