#pragma once

// Configuration loading for the CLI: law records ({"law": {"variant": ...}}),
// numeric grids, and numeric data files (one value per line, or CSV with a
// column selector).  The JSON schema is documented in the README.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "srelab/laws.hpp"
#include "srelab/slowvary.hpp"

namespace srelab::config {

nlohmann::json load_json(const std::filesystem::path& path);

laws::NoiseLaw parse_noise(const nlohmann::json& j);
laws::CoefficientLaw parse_law(const nlohmann::json& j);
slowvary::PositiveLawY parse_law_y(const nlohmann::json& j);

// Either an explicit array, or {"from", "to", "points", "spacing": "log" |
// "linear"}.  Integer grids round geometric points to the nearest integer
// and drop duplicates.
std::vector<double> parse_grid(const nlohmann::json& j, const std::string& name);
std::vector<uint64_t> parse_count_grid(const nlohmann::json& j,
                                       const std::string& name);

// Lines of plain numbers ('#' comments and blanks skipped), or, with a
// non-empty selector, a CSV column chosen by header name or 0-based index.
std::vector<double> load_numeric_file(const std::filesystem::path& path,
                                      const std::string& column = "");

// Decimal or 0x-prefixed hex.
uint64_t parse_seed(const std::string& text);

}  // namespace srelab::config
