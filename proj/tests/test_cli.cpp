#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() { return std::string(SRELAB_BINARY_DIR) + "/srelab"; }

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("srelab_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  REQUIRE(out.good());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string digest_of(const fs::path& report_json) {
  const std::string text = slurp(report_json);
  const std::string key = "\"digest\": \"";
  const size_t pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  const size_t start = pos + key.size();
  return text.substr(start, text.find('"', start) - start);
}

const char* kGarchLaw =
    R"({"variant": "garch_critical", "beta": 1.0, "lambda": 1.0,
        "noise": {"variant": "three_atom"}})";

}  // namespace

TEST_CASE("selftest passes") {
  const auto dir = fresh_dir("selftest");
  CHECK(run("selftest --out " + dir.string()) == 0);
}

TEST_CASE("constants emits a report for a valid law") {
  const auto dir = fresh_dir("constants");
  const auto law = dir / "law.json";
  write_file(law, kGarchLaw);
  CHECK(run("constants --law " + law.string() + " --out " + dir.string()) == 0);
  const std::string rep = slurp(dir / "report.json");
  CHECK(rep.find("\"kappa\"") != std::string::npos);
  CHECK(fs::exists(dir / "curves.csv"));
}

TEST_CASE("a missing law file is a usage error with no outputs") {
  const auto dir = fresh_dir("missing");
  CHECK(run("constants --law " + (dir / "nope.json").string() + " --out " +
            dir.string()) == 1);
  CHECK(!fs::exists(dir / "report.json"));
  CHECK(!fs::exists(dir / "curves.csv"));
}

TEST_CASE("unknown subcommands and bad flags are rejected") {
  CHECK(run("frobnicate") != 0);
  CHECK(run("perpetuity") != 0);  // --law is required
}

TEST_CASE("perpetuity run produces both artifacts and is replayable") {
  const auto dir1 = fresh_dir("perp1");
  const auto dir2 = fresh_dir("perp2");
  const auto law = dir1 / "law.json";
  write_file(law, kGarchLaw);
  const std::string base = "perpetuity --law " + law.string() +
                           " --reps 5000 --seed 17 --gof-exact --out ";
  CHECK(run(base + dir1.string()) == 0);
  CHECK(run(base + dir2.string()) == 0);
  CHECK(slurp(dir1 / "curves.csv") == slurp(dir2 / "curves.csv"));
  CHECK(digest_of(dir1 / "report.json") == digest_of(dir2 / "report.json"));
}

TEST_CASE("experiment digests do not depend on the worker count") {
  const auto dir = fresh_dir("threads");
  const auto cfg = dir / "cfg.json";
  write_file(cfg, std::string("{\"law\": ") + kGarchLaw +
                      R"(, "t_grid": {"from": 31, "to": 1048575,
                          "points": 4, "spacing": "log"},
                          "reps": 20000, "check_ratio": false})");
  std::string digest[3];
  int i = 0;
  for (int threads : {1, 2, 4}) {
    const auto out = fresh_dir("threads_" + std::to_string(threads));
    CHECK(run("truncmoment --config " + cfg.string() + " --seed 9 --threads " +
              std::to_string(threads) + " --out " + out.string()) == 0);
    digest[i++] = digest_of(out / "report.json");
  }
  CHECK(digest[0] == digest[1]);
  CHECK(digest[0] == digest[2]);
}

TEST_CASE("failed verdicts exit with status 2 but still write the report") {
  const auto dir = fresh_dir("verdict2");
  const auto cfg = dir / "cfg.json";
  // The ratio sits near 0.95 at t = 2^20; a band at [5, 6] cannot pass.
  write_file(cfg, std::string("{\"law\": ") + kGarchLaw +
                      R"(, "t_grid": {"from": 31, "to": 1048575,
                          "points": 4, "spacing": "log"},
                          "reps": 20000,
                          "ratio_lo": 5.0, "ratio_hi": 6.0})");
  CHECK(run("truncmoment --config " + cfg.string() + " --seed 9 --out " +
            dir.string()) == 2);
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("slowvary probe verdict drives the exit code") {
  const auto dir = fresh_dir("slowvary");
  CHECK(run("slowvary --ell ap4:0.75 --probe 2a --expect diverge --out " +
            dir.string()) == 0);
  const auto dir2 = fresh_dir("slowvary2");
  CHECK(run("slowvary --ell ap4:0.75 --probe 2a --expect converge --out " +
            dir2.string()) == 2);
  const auto dir3 = fresh_dir("slowvary3");
  CHECK(run("slowvary --ell log --probe 2b --grid-to 1e10 --expect converge --out " +
            dir3.string()) == 0);
}
