#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torsoseg/schema.hpp"

namespace torsoseg::cli {

using Json = nlohmann::ordered_json;

// Tool version, catalog identity and every resolved option of `sub`.
Json report_header(const CLI::App& sub, const LabelSchema* schema);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
void warn(const std::string& message);
void warn_all(const std::vector<std::string>& messages);

}  // namespace torsoseg::cli
