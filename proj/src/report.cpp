#include "srelab/report.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "json.hpp"

#include "srelab/error.hpp"
#include "srelab/stats.hpp"

namespace srelab::report {

bool ExperimentReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

void ExperimentReport::finalize_digest() {
  stats::Digest d;
  for (const auto& row : rows)
    for (double v : row) d.add(v);
  for (const auto& v : verdicts) {
    d.add(v.rule);
    d.add(static_cast<uint64_t>(v.pass ? 1 : 0));
    d.add(v.value);
    d.add(v.threshold);
  }
  manifest.digest = d.hex();
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string report_to_json(const ExperimentReport& rep) {
  nlohmann::ordered_json j;
  j["tool"] = rep.manifest.tool_version;
  j["subcommand"] = rep.manifest.subcommand;
  j["scenario"] = rep.scenario;
  if (!rep.manifest.config_json.empty()) {
    j["config"] = nlohmann::ordered_json::parse(rep.manifest.config_json);
  } else {
    j["config"] = nlohmann::ordered_json::object();
  }
  j["seed"] = rep.manifest.seed;
  j["reps"] = rep.manifest.reps;
  j["threads"] = rep.manifest.threads;
  j["wall_seconds"] = rep.manifest.wall_seconds;
  j["digest"] = rep.manifest.digest;
  j["columns"] = rep.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows) rows.push_back(row);
  j["rows"] = std::move(rows);
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : rep.verdicts) {
    nlohmann::ordered_json jv;
    jv["rule"] = v.rule;
    jv["pass"] = v.pass;
    jv["value"] = v.value;
    jv["threshold"] = v.threshold;
    if (!v.note.empty()) jv["note"] = v.note;
    verdicts.push_back(std::move(jv));
  }
  j["verdicts"] = std::move(verdicts);
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

void write_report_json(const ExperimentReport& rep,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << report_to_json(rep) << "\n";
}

void write_curves_csv(const ExperimentReport& rep,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (size_t i = 0; i < rep.columns.size(); ++i)
    out << (i ? "," : "") << rep.columns[i];
  out << "\n";
  for (const auto& row : rep.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

}  // namespace srelab::report
