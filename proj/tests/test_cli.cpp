// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RECLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string write_file(const std::string& name, const std::string& body) {
  fs::create_directories(RECLAB_TEST_TMP);
  const fs::path p = fs::path(RECLAB_TEST_TMP) / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kDichotomy = R"({
  "experiment": "dichotomy", "seed": 3,
  "map": {"kind": "beta", "beta": 2.0},
  "schedule": {"kind": "power_law", "c": [0.1], "a": [1.0]},
  "params": {"samples": 2000, "horizon": 512}
})";

}  // namespace

TEST_CASE("dimension from flags") {
  const auto r = run("dimension --betas 2,4 --t 0.6931471805599453,0.6931471805599453");
  CHECK(r.status == 0);
  CHECK(r.out.find("dimension = 1.3333333333333333") != std::string::npos);
  CHECK(r.out.find("K2={1,2}") != std::string::npos);
}

TEST_CASE("subshift from flags") {
  const auto r = run("subshift --beta 3 --epsilon 0.2");
  CHECK(r.status == 0);
  CHECK(r.out.find("m = 15") != std::string::npos);
  CHECK(r.out.find("delta = 1") != std::string::npos);
}

TEST_CASE("malformed JSON exits 2") {
  const auto path = write_file("broken.json", "{\"experiment\": ");
  CHECK(run("run --config " + path).status == 2);
  CHECK(run("validate --config " + path).status == 2);
}

TEST_CASE("validate lists violations") {
  const auto path = write_file("bad.json", R"({"experiment": "dichotomy", "seed": 1,
    "map": {"kind": "beta", "beta": 0.9}, "schedule": {"kind": "power_law", "c": [0.1], "a": [1]}})");
  const auto r = run("validate --config " + path);
  CHECK(r.status == 2);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["valid"] == false);
  CHECK(j["violations"][0] == "expansion requires |beta|>1");
  CHECK(run("run --config " + path).status == 2);

  const auto ok = write_file("ok.json", kDichotomy);
  CHECK(run("validate --config " + ok).status == 0);
}

TEST_CASE("runtime errors exit 3") {
  // Valid schema, but the hyperboloid volume needs delta < r^d.
  const auto path = write_file("vol.json", R"({"experiment": "volume", "seed": 1,
    "params": {"d": 2, "r": 0.5, "deltas": [0.3], "samples": 1000}})");
  CHECK(run("run --config " + path).status == 3);
}

TEST_CASE("dichotomy run writes report and CSV, reproducibly across threads") {
  const auto cfg = write_file("dich.json", kDichotomy);
  const fs::path dir = fs::path(RECLAB_TEST_TMP);
  REQUIRE(run("dichotomy --config " + cfg + " --threads 1 --out " + (dir / "a.json").string()).status == 0);
  REQUIRE(run("dichotomy --config " + cfg + " --threads 3 --out " + (dir / "b.json").string()).status == 0);
  for (const char* t : {"series", "windows", "hits"}) {
    const auto a = slurp(dir / (std::string("a_") + t + ".csv"));
    CHECK(!a.empty());
    CHECK(a == slurp(dir / (std::string("b_") + t + ".csv")));
  }
  const auto series = slurp(dir / "a_series.csv");
  CHECK(series.rfind("n,exact_measure,mc_estimate,mc_stderr,partial_sum\r\n", 0) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(report["results"]["classification"] == "divergent");
  CHECK(report["results"]["tail_windows"].size() > 0);
  CHECK(report["seed"] == 3);

  // --seed overrides the config seed.
  REQUIRE(run("dichotomy --config " + cfg + " --seed 4 --out " + (dir / "c.json").string()).status == 0);
  CHECK(slurp(dir / "c_hits.csv") != slurp(dir / "a_hits.csv"));
}
