// Copyright 2026 The QKFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qkfe/config.hpp"
#include "qkfe/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("qkfe_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(QKFE_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a tab-separated output file as split cells.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

int column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config loading") {
  const auto c = qkfe::load_config("model: xxz1d\nL: 6\nN: 32\nT: [1, 2]\n", {"moments.mode=stochastic", "seed=9"});
  CHECK(c.model.length == 6);
  CHECK(c.cutoff == 32);
  CHECK(c.seed == 9);
  CHECK(c.beta_grid().size() == 2);
  CHECK(c.beta_grid().front() < c.beta_grid().back());
  CHECK_THROWS_AS(qkfe::load_config("model: xxz1d\nL: 6\nfoo: 1\n", {}), qkfe::InvalidArgument);
  CHECK_THROWS_AS(qkfe::load_config("model: xxz1d\nL: 6\n", {"moments.bogus=1"}), qkfe::InvalidArgument);
  CHECK_THROWS_AS(qkfe::load_config("model: xxz1d\nL: 1\n", {}), qkfe::InvalidArgument);
  CHECK_THROWS_AS(qkfe::load_config("model: xxz1d\nL: 6\nN: 0\n", {}), qkfe::InvalidArgument);
  CHECK_THROWS_AS(qkfe::load_config("model: [", {}), qkfe::InvalidArgument);
  // the resolved config reloads to the same resolved config
  const auto again = qkfe::load_config(c.to_yaml(), {});
  CHECK(again.to_yaml() == c.to_yaml());
}

TEST_CASE("moments command") {
  Scratch s;
  const std::string out = (s.dir / "m").string();
  REQUIRE(run("moments -s model=xxz1d -s L=8 -s N=12 -o " + out) == 0);
  const auto r = rows(fs::path(out) / "moments.tsv");
  REQUIRE(r.size() == 13);
  CHECK(r[1][column(r[0], "value")] == "1");
  const std::string text = slurp(fs::path(out) / "moments.tsv");
  CHECK(text.find("# qkfe ") == 0);
  CHECK(text.find("#   N: 12") != std::string::npos);

  // stochastic estimates approach the oracle column as R grows
  double prev = 1e9;
  for (int R : {5, 100}) {
    const std::string d = (s.dir / ("r" + std::to_string(R))).string();
    REQUIRE(run("moments -s model=xxz1d -s L=8 -s N=6 -s moments.mode=stochastic -s moments.R=" +
                std::to_string(R) + " -o " + d) == 0);
    const auto t = rows(fs::path(d) / "moments.tsv");
    const double v = std::stod(t[4][column(t[0], "value")]);
    const double ex = std::stod(t[4][column(t[0], "exact")]);
    const double se = std::stod(t[4][column(t[0], "stderr")]);
    CHECK(std::abs(v - ex) < 4 * se);
    CHECK(se < prev);
    prev = se;
  }
}

TEST_CASE("malformed configs leave no output") {
  Scratch s;
  const fs::path cfg = s.dir / "bad.yaml";
  std::ofstream(cfg) << "model: xxz1d\nL: 8\nN: 10\nunknown_key: 3\n";
  const fs::path out = s.dir / "o";
  CHECK(run("moments -c " + cfg.string() + " -o " + out.string()) == 1);
  CHECK(!fs::exists(out / "moments.tsv"));
  std::ofstream(cfg) << "model: xxz1d\nL: [\n";
  CHECK(run("moments -c " + cfg.string() + " -o " + out.string()) == 1);
  CHECK(!fs::exists(out));
  CHECK(run("thermo -s model=xxz1d -s L=6 -o " + out.string()) == 1);  // empty T grid
  CHECK(!fs::exists(out / "thermo.tsv"));
  CHECK(run("moments -s model=xxz1d -s L=12 -s oracle_max_qubits=8 -o " + out.string()) == 3);
  CHECK(run("nosuchcommand") != 0);
}

TEST_CASE("thermo command") {
  Scratch s;
  const std::string out = (s.dir / "t").string();
  REQUIRE(run("thermo -s model=xxz1d -s L=8 -s N=100 -s T=[3] -s observable=zz:0,1 --json -o " + out) == 0);
  const auto r = rows(fs::path(out) / "thermo.tsv");
  REQUIRE(r.size() == 2);
  const double ratio = std::stod(r[1][column(r[0], "Z_ratio")]);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.02));
  CHECK(column(r[0], "A") >= 0);
  CHECK(fs::exists(fs::path(out) / "thermo.json"));
  CHECK(slurp(fs::path(out) / "thermo.json").find("\"columns\"") != std::string::npos);
}

TEST_CASE("thei command") {
  Scratch s;
  const std::string out = (s.dir / "e").string();
  REQUIRE(run("thei -s model=xxz1d -s L=6 -s N=64 -s thei.beta_max=1 -o " + out) == 0);
  const auto r = rows(fs::path(out) / "thei.tsv");
  REQUIRE(r.size() >= 3);
  CHECK(std::stod(r[1][column(r[0], "S")]) == doctest::Approx(6 * std::log(2.0)));
  CHECK(std::stod(r[1][column(r[0], "beta")]) == 0.0);

  const std::string micro = (s.dir / "mc").string();
  run("thei -s model=xxz1d -s L=6 -s N=64 -s thei.beta_max=1 -s thei.ensemble=microcanonical -o " + micro);
  const auto m = rows(fs::path(micro) / "thei.tsv");
  REQUIRE(m.size() >= 3);
  bool flagged = false;
  for (std::size_t i = 2; i < m.size(); ++i) flagged = flagged || m[i][column(m[0], "verified")] == "0";
  CHECK(flagged);
}

TEST_CASE("gatecount and prep commands") {
  Scratch s;
  const std::string out = (s.dir / "g").string();
  REQUIRE(run("gatecount -o " + out) == 0);
  auto r = rows(fs::path(out) / "gatecount.tsv");
  CHECK(r[1][column(r[0], "formula")] == "675");
  CHECK(r[1][column(r[0], "constructed")] == "675");
  REQUIRE(run("gatecount -s gatecount.L=2 -s gatecount.n=1 -s gatecount.dt_over_pi=1 -o " + out) == 0);
  r = rows(fs::path(out) / "gatecount.tsv");
  CHECK(r[1][column(r[0], "constructed")] == "15");

  const std::string p = (s.dir / "p").string();
  REQUIRE(run("prep -s model=xxz1d -s L=4 -s prep.steps=20 -o " + p) == 0);
  CHECK(fs::exists(fs::path(p) / "prep.tsv"));
  CHECK(fs::exists(fs::path(p) / "prep_gates.txt"));
}

TEST_CASE("output is identical across thread counts") {
  Scratch s;
  const std::string base = "moments -s model=xxz1d -s L=8 -s N=16 -s moments.mode=stochastic -s moments.R=12 -s seed=5";
  const std::string a = (s.dir / "a").string();
  const std::string b = (s.dir / "b").string();
  REQUIRE(run(base + " -j 1 -o " + a) == 0);
  REQUIRE(run(base + " -j 4 -o " + b) == 0);
  CHECK(slurp(fs::path(a) / "moments.tsv") == slurp(fs::path(b) / "moments.tsv"));
  CHECK(slurp(fs::path(a) / "moments_observable.tsv").empty() ==
        slurp(fs::path(b) / "moments_observable.tsv").empty());

  const std::string thermo = "thermo -s model=xxz1d -s L=6 -s N=40 -s moments.mode=stochastic -s T=[1,2,5] -s seed=3";
  REQUIRE(run(thermo + " -j 1 -o " + a) == 0);
  REQUIRE(run(thermo + " -j 3 -o " + b) == 0);
  CHECK(slurp(fs::path(a) / "thermo.tsv") == slurp(fs::path(b) / "thermo.tsv"));
}

TEST_CASE("output directory from the environment") {
  Scratch s;
  const fs::path env_dir = s.dir / "env";
  REQUIRE(run("gatecount", "cd " + s.dir.string() + " && QKFE_OUTPUT_DIR=" + env_dir.string()) == 0);
  CHECK(fs::exists(env_dir / "gatecount.tsv"));
  // an explicit flag wins over the environment
  const fs::path flag_dir = s.dir / "flag";
  REQUIRE(run("gatecount -o " + flag_dir.string(), "QKFE_OUTPUT_DIR=" + env_dir.string()) == 0);
  CHECK(fs::exists(flag_dir / "gatecount.tsv"));
}

}  // TEST_SUITE
