#include <doctest.h>

#include "cli.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using orthant::cli::run;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("orthant_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

class EnvVar {
 public:
  EnvVar(const char* name, const std::string& value) : name_(name) { ::setenv(name, value.c_str(), 1); }
  ~EnvVar() { ::unsetenv(name_); }
  EnvVar(const EnvVar&) = delete;
  EnvVar& operator=(const EnvVar&) = delete;

 private:
  const char* name_;
};

class CaptureStream {
 public:
  explicit CaptureStream(std::ostream& s) : s_(s), old_(s.rdbuf(buf_.rdbuf())) {}
  ~CaptureStream() { s_.rdbuf(old_); }
  CaptureStream(const CaptureStream&) = delete;
  CaptureStream& operator=(const CaptureStream&) = delete;
  std::string text() const { return buf_.str(); }

 private:
  std::ostream& s_;
  std::ostringstream buf_;
  std::streambuf* old_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> small_sample(const std::string& out) {
  return {"sample", "--preset", "custom", "--model", "poisson", "--d", "3", "--n", "200",
          "--trials", "2", "--steps", "500", "--burn-in", "100", "--seed", "5", "--out", out};
}

}  // namespace

TEST_CASE("gap exponential") {
  TempDir tmp;
  REQUIRE(run({"gap", "--benchmark", "exponential", "--rate", "1", "--grid", "4000", "--out", tmp.str()}) == 0);
  const json j = read_json(tmp.path() / "gap_exponential" / "gap.json");
  // Reflecting ends at 0 and 20: 1/4 + (pi/20)^2.
  CHECK(j["gap"].get<double>() == doctest::Approx(0.25 + M_PI * M_PI / 400.0).epsilon(1e-4));
  CHECK(j["implied_C_PI"].get<double>() <= 4.0);
  CHECK(j["within_bound"].get<bool>());
  CHECK(lines(slurp(tmp.path() / "gap_exponential" / "gap.csv")).size() == 2);
}

TEST_CASE("usage and hard errors exit 2") {
  TempDir tmp;
  CaptureStream err(std::cerr);
  CaptureStream out(std::cout);
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"gap", "--benchmark", "cauchy", "--out", tmp.str()}) == 2);
  CHECK(run({"sample", "--preset", "asymptotic", "--d", "11", "--out", tmp.str()}) == 2);
  CHECK(run({"sample", "--preset", "pre_asymptotic", "--trials", "3", "--out", tmp.str()}) == 2);
  CHECK(run({"check", "--preset", "asymptotic", "--factor", "5", "--out", tmp.str()}) == 2);
  CHECK(err.text().find("pins") != std::string::npos);
}

TEST_CASE("check exit codes") {
  TempDir tmp;
  CaptureStream out(std::cout);
  const std::vector<std::string> base{"check", "--preset", "asymptotic", "--model", "logistic", "--grid", "64",
                                      "--outside-samples", "200", "--out", tmp.str()};
  CHECK(run(base) == 0);
  const json a = read_json(tmp.path() / "asymptotic_logistic_seed0" / "assumptions.json");
  CHECK(a["report"]["d1"].get<int>() == 1);
  CHECK(a["report"]["d0"].get<int>() == 9);
  CHECK(a["report"]["c_S0_hat"].get<double>() > 0.0);
  CHECK(a["report"]["C_S1_hat"].get<double>() > 0.0);

  auto strict = base;
  strict.insert(strict.end(), {"--min-curvature", "1e9"});
  CHECK(run(strict) == 1);
  const json m = read_json(tmp.path() / "asymptotic_logistic_seed0" / "manifest.json");
  CHECK(m["failed_checks"].size() == 1);
}

TEST_CASE("manifest and reproducible outputs") {
  TempDir tmp;
  CaptureStream out(std::cout);
  REQUIRE(run(small_sample(tmp.str())) == 0);
  const fs::path dir = tmp.path() / "custom_poisson_seed5";
  const json m = read_json(dir / "manifest.json");
  for (const char* key : {"command", "config", "config_hash", "seeds", "versions", "failures", "outputs", "wall_time_ms"}) {
    CHECK_MESSAGE(m.contains(key), key);
  }
  CHECK(m["command"] == "sample");
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["seeds"]["master"] == 5);
  CHECK(m["seeds"]["trials"].size() == 2);
  CHECK(m["versions"].contains("eigen"));
  CHECK(fs::exists(dir / "chains" / "0.csv"));
  CHECK(lines(slurp(dir / "llr_ess.csv")).size() == 3);
  CHECK(lines(slurp(dir / "ess_per_coordinate.csv")).size() == 7);

  const std::string chain0 = slurp(dir / "chains" / "0.csv");
  const std::string ess = slurp(dir / "ess_per_coordinate.csv");
  const std::string hash = m["config_hash"];
  REQUIRE(run(small_sample(tmp.str())) == 0);
  CHECK(slurp(dir / "chains" / "0.csv") == chain0);
  CHECK(slurp(dir / "ess_per_coordinate.csv") == ess);
  CHECK(read_json(dir / "manifest.json")["config_hash"] == hash);

  SUBCASE("ess from exported chains matches") {
    const TempDir other;
    REQUIRE(run({"ess", "--preset", "custom", "--model", "poisson", "--d", "3", "--out", other.str(), "--chains",
                 (dir / "chains" / "0.csv").string(), (dir / "chains" / "1.csv").string()}) == 0);
    const auto mine = lines(slurp(other.path() / "custom_poisson_seed0" / "ess_per_coordinate.csv"));
    const auto theirs = lines(ess);
    REQUIRE(mine.size() == theirs.size());
    for (std::size_t i = 0; i < mine.size(); ++i) CHECK(mine[i] == theirs[i]);
  }
}

TEST_CASE("seed environment variable overrides the flag") {
  TempDir tmp;
  CaptureStream out(std::cout);
  {
    EnvVar env("ORTHANT_GIBBS_SEED", "77");
    REQUIRE(run({"simulate", "--preset", "custom", "--model", "logistic", "--d", "3", "--n", "20", "--seed", "5",
                 "--out", tmp.str()}) == 0);
    CHECK(fs::exists(tmp.path() / "custom_logistic_seed77" / "data" / "trial_0.csv"));
    CHECK(read_json(tmp.path() / "custom_logistic_seed77" / "manifest.json")["seeds"]["master"] == 77);
  }
  {
    CaptureStream err(std::cerr);
    EnvVar env("ORTHANT_GIBBS_SEED", "seven");
    CHECK(run({"simulate", "--out", tmp.str()}) == 2);
    CHECK(err.text().find("ORTHANT_GIBBS_SEED") != std::string::npos);
  }
}

TEST_CASE("config file and flag precedence") {
  TempDir tmp;
  CaptureStream out(std::cout);
  const fs::path cfg = tmp.path() / "cfg.json";
  std::ofstream(cfg) << json{{"preset", "custom"}, {"model", "poisson"}, {"d", 3}, {"n", 40}, {"seed", 8}}.dump();
  REQUIRE(run({"simulate", "--config", cfg.string(), "--d", "4", "--out", tmp.str()}) == 0);
  const json m = read_json(tmp.path() / "custom_poisson_seed8" / "manifest.json");
  CHECK(m["config"]["d"] == 4);
  CHECK(m["config"]["n"] == 40);

  const fs::path bad = tmp.path() / "bad.json";
  std::ofstream(bad) << "{\n  \"d\": 3,\n  \"n\": ,\n}\n";
  {
    CaptureStream err(std::cerr);
    CHECK(run({"simulate", "--config", bad.string(), "--out", tmp.str()}) == 2);
    CHECK(err.text().find("bad.json:3:") != std::string::npos);
  }
  const fs::path unknown = tmp.path() / "unknown.json";
  std::ofstream(unknown) << json{{"dimension", 3}}.dump();
  {
    CaptureStream err(std::cerr);
    CHECK(run({"simulate", "--config", unknown.string(), "--out", tmp.str()}) == 2);
    CHECK(err.text().find("dimension") != std::string::npos);
  }
}

TEST_CASE("asymptotic coverage table") {
  TempDir tmp;
  CaptureStream out(std::cout);
  REQUIRE(run({"coverage", "--preset", "asymptotic", "--model", "logistic", "--trials", "2", "--jobs", "2", "--out",
               tmp.str()}) == 0);
  const auto rows = lines(slurp(tmp.path() / "asymptotic_logistic_seed0" / "coverage.csv"));
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == "coordinate,coverage,is_boundary");
  int boundary = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].substr(rows[i].size() - 2) == ",1") ++boundary;
  }
  CHECK(boundary == 1);
  CHECK(rows[6].substr(0, 2) == "5,");
  CHECK(rows[6].substr(rows[6].size() - 2) == ",1");
}

TEST_CASE("executable exit status") {
  TempDir tmp;
  const std::string exe = ORTHANT_GIBBS_EXE;
  const std::string quiet = " > /dev/null 2>&1";
  int st = std::system((exe + " gap --benchmark uniform --grid 500 --out " + tmp.str() + quiet).c_str());
  CHECK(WEXITSTATUS(st) == 0);
  st = std::system((exe + " gap --benchmark nope --out " + tmp.str() + quiet).c_str());
  CHECK(WEXITSTATUS(st) == 2);
  st = std::system((exe + " --help" + quiet).c_str());
  CHECK(WEXITSTATUS(st) == 0);
}
