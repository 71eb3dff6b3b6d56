#pragma once

// Experiment report plumbing: per-level statistics, named verdicts, the run
// manifest with a worker-count-independent digest, and JSON/CSV emission.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace srelab::report {

inline constexpr const char* kToolVersion = "srelab 1.0.0";

struct VerdictEntry {
  std::string rule;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string subcommand;
  std::string config_json;  // resolved configuration, compact JSON
  uint64_t seed = 0;
  uint64_t reps = 0;
  unsigned threads = 1;
  double wall_seconds = 0.0;
  std::string digest;  // hex, over all statistics in canonical order
};

struct ExperimentReport {
  std::string scenario;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<VerdictEntry> verdicts;
  RunManifest manifest;

  bool all_pass() const;
  // FNV-1a over rows then verdict values, in order; fills manifest.digest.
  void finalize_digest();
};

// report.json with stable key order; curves.csv with a header row and
// shortest round-trip decimal formatting.
void write_report_json(const ExperimentReport& rep,
                       const std::filesystem::path& path);
void write_curves_csv(const ExperimentReport& rep,
                      const std::filesystem::path& path);
std::string report_to_json(const ExperimentReport& rep);

}  // namespace srelab::report
