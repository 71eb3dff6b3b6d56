#include "srelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "srelab/error.hpp"

namespace srelab::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& require(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) fail("missing field \"" + key + "\"");
  return j.at(key);
}

double num(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) fail("field \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string str(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_string()) fail("field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const std::string& key,
                   const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return str(j, key);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  return j;
}

laws::NoiseLaw parse_noise(const json& j) {
  const std::string variant = str(j, "variant");
  if (variant == "standard_normal") return laws::NoiseLaw::standard_normal();
  if (variant == "three_atom") return laws::three_atom_noise();
  if (variant == "discrete") {
    const json& pts = require(j, "points");
    if (!pts.is_array() || pts.empty()) fail("\"points\" must be a non-empty array");
    std::vector<laws::DiscretePoint> out;
    for (const auto& p : pts) out.push_back({num(p, "value"), num(p, "prob")});
    return laws::NoiseLaw::discrete(std::move(out));
  }
  if (variant == "student_t_normalized")
    return laws::NoiseLaw::student_t_normalized(num(j, "df"));
  if (variant == "empirical") {
    const std::string file = str(j, "file");
    auto values = load_numeric_file(file, str_or(j, "column", ""));
    return laws::NoiseLaw::empirical(std::move(values), file);
  }
  fail("unknown noise variant \"" + variant + "\"");
}

laws::CoefficientLaw parse_law(const json& doc) {
  const json& j = doc.contains("law") ? doc.at("law") : doc;
  const std::string variant = str(j, "variant");
  if (variant == "garch_critical")
    return laws::make_garch_critical(num(j, "beta"), num(j, "lambda"),
                                     parse_noise(require(j, "noise")));
  if (variant == "garch_general")
    return laws::garch_to_sre(num(j, "beta"), num(j, "lambda"),
                              num(j, "delta"),
                              parse_noise(require(j, "noise")));
  if (variant == "lognormal_A_const_B")
    return laws::make_lognormal_A_const_B(num(j, "mu"), num(j, "sigma"),
                                          num(j, "b"));
  if (variant == "finite_discrete") {
    const json& atoms = require(j, "atoms");
    if (!atoms.is_array() || atoms.empty()) fail("\"atoms\" must be a non-empty array");
    std::vector<laws::CoefficientLaw::AtomAB> out;
    for (const auto& a : atoms)
      out.push_back({num(a, "a"), num(a, "b"), num(a, "prob")});
    return laws::make_finite_discrete(std::move(out));
  }
  if (variant == "kevei")
    return laws::build_kevei_law(num(j, "alpha"), num(j, "kappa"),
                                 num(j, "v0"), num(j, "p"), num(j, "b"));
  fail("unknown law variant \"" + variant + "\"");
}

slowvary::PositiveLawY parse_law_y(const json& doc) {
  const json& j = doc.contains("law_y") ? doc.at("law_y") : doc;
  const std::string variant = str(j, "variant");
  if (variant == "pareto_one") return slowvary::PositiveLawY::pareto_one();
  if (variant == "st_petersburg")
    return slowvary::PositiveLawY::st_petersburg();
  if (variant == "constant")
    return slowvary::PositiveLawY::constant(num(j, "value"));
  if (variant == "sampled") {
    const std::string file = str(j, "file");
    return slowvary::PositiveLawY::sampled(
        load_numeric_file(file, str_or(j, "column", "")), file);
  }
  fail("unknown positive-law variant \"" + variant + "\"");
}

std::vector<double> parse_grid(const json& j, const std::string& name) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) fail("grid \"" + name + "\" must contain numbers");
      out.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    const double from = num(j, "from");
    const double to = num(j, "to");
    const int points = static_cast<int>(num(j, "points"));
    const std::string spacing = str_or(j, "spacing", "log");
    if (points < 2) fail("grid \"" + name + "\" needs at least 2 points");
    if (!(to > from)) fail("grid \"" + name + "\": \"to\" must exceed \"from\"");
    if (spacing == "log") {
      if (!(from > 0)) fail("grid \"" + name + "\": log spacing needs from > 0");
      const double r = std::log(to / from) / (points - 1);
      for (int i = 0; i < points; ++i) out.push_back(from * std::exp(r * i));
      out.back() = to;
    } else if (spacing == "linear") {
      const double step = (to - from) / (points - 1);
      for (int i = 0; i < points; ++i) out.push_back(from + step * i);
      out.back() = to;
    } else {
      fail("grid \"" + name + "\": unknown spacing \"" + spacing + "\"");
    }
  } else {
    fail("grid \"" + name + "\" must be an array or a range object");
  }
  if (out.size() < 2) fail("grid \"" + name + "\" needs at least 2 points");
  for (size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) fail("grid \"" + name + "\" must be increasing");
  return out;
}

std::vector<uint64_t> parse_count_grid(const json& j, const std::string& name) {
  auto g = parse_grid(j, name);
  std::vector<uint64_t> out;
  for (double v : g) {
    if (!(v >= 1)) fail("grid \"" + name + "\" must contain counts >= 1");
    const uint64_t n = static_cast<uint64_t>(std::llround(v));
    if (out.empty() || n != out.back()) out.push_back(n);
  }
  if (out.size() < 2) fail("grid \"" + name + "\" collapses to fewer than 2 counts");
  return out;
}

std::vector<double> load_numeric_file(const std::filesystem::path& path,
                                      const std::string& column) {
  std::ifstream in(path);
  if (!in) fail("cannot open data file " + path.string());
  std::vector<double> out;
  std::string line;
  if (column.empty()) {
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos || line[a] == '#') continue;
      double v;
      if (!parse_double(line.substr(a), v))
        fail(path.string() + ":" + std::to_string(lineno) +
             ": not a number (use a column selector for CSV input)");
      out.push_back(v);
    }
  } else {
    if (!std::getline(in, line)) fail(path.string() + ": empty file");
    const auto header = split_csv_line(line);
    size_t idx = header.size();
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == column) idx = i;
    bool header_consumed = true;
    if (idx == header.size()) {
      char* end = nullptr;
      const unsigned long parsed = std::strtoul(column.c_str(), &end, 10);
      if (end == column.c_str() || *end != '\0')
        fail(path.string() + ": no column named \"" + column + "\"");
      idx = parsed;
      // a numeric selector may point into a headerless file
      double probe;
      if (idx < header.size() && parse_double(header[idx], probe)) {
        out.push_back(probe);
        header_consumed = false;
      }
    }
    (void)header_consumed;
    size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const auto fields = split_csv_line(line);
      if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
      if (idx >= fields.size())
        fail(path.string() + ":" + std::to_string(lineno) +
             ": fewer than " + std::to_string(idx + 1) + " columns");
      double v;
      if (!parse_double(fields[idx], v))
        fail(path.string() + ":" + std::to_string(lineno) +
             ": field is not a number");
      out.push_back(v);
    }
  }
  if (out.empty()) fail(path.string() + ": no numeric data found");
  return out;
}

uint64_t parse_seed(const std::string& text) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
  if (end == text.c_str() || *end != '\0')
    fail("seed must be a decimal or 0x-prefixed integer, got \"" + text + "\"");
  return static_cast<uint64_t>(v);
}

}  // namespace srelab::config
