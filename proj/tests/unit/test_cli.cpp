/*
 * Copyright 2026 The fockfusion Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fockfusion/csv.hpp"

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(FOCKFUSION_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fockfusion::CsvTable table(const std::string& text) {
  std::istringstream in(text);
  return fockfusion::read_csv(in);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fockfusion_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("psub") {
  Result r = cli("psub --m 1 --n 1 --eta 0.7071067811865476 --s 0");
  CHECK(r.status == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.5).epsilon(1e-12));
  r = cli("psub --m 1 --n 0 --eta 0.6");
  REQUIRE(r.status == 0);
  const auto t = table(r.out);
  CHECK(t.numbers("probability")[0] == doctest::Approx(0.64));
  CHECK(t.numbers("probability")[1] == doctest::Approx(0.36));
  CHECK(t.comments.front().find("manifest=") != std::string::npos);
}

TEST_CASE("oracle agrees with psub") {
  const auto a = table(cli("psub --m 4 --n 3 --eta 0.4").out).numbers("probability");
  for (const char* method : {"matrix", "convolution"}) {
    const Result r = cli(std::string("oracle --m 4 --n 3 --eta 0.4 --method ") + method);
    REQUIRE(r.status == 0);
    const auto b = table(r.out).numbers("probability");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("exit codes") {
  CHECK(cli("psub --m 1 --n 1 --eta 1.5").status == 2);
  CHECK(cli("psub --n 1 --eta 0.5").status == 2);
  CHECK(cli("simulate --strategy frugal").status == 2);
  CHECK(cli("simulate --d 8 --seed banana").status == 2);
  CHECK(cli("oracle --m 30 --n 30 --eta 0.5 --method matrix").status == 3);
  CHECK(cli("no-such-command").status == 2);
  CHECK(cli("--help").status == 0);
}

TEST_CASE("optimize tables") {
  Result r = cli("optimize --objective recycled --max-m 6 --max-n 6 --grid-step 0.01");
  REQUIRE(r.status == 0);
  auto t = table(r.out);
  const auto m = t.numbers("m");
  const auto n = t.numbers("n");
  const auto p = t.numbers("p_opt");
  REQUIRE(p.size() == 36);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i] == n[i]) CHECK(p[i] == doctest::Approx(0.5).epsilon(1e-6));
  }
  r = cli("optimize --objective nonrecycled --max-m 6 --max-n 6 --grid-step 0.01");
  REQUIRE(r.status == 0);
  t = table(r.out);
  const auto pn = t.numbers("p_opt");
  for (std::size_t row = 1; row < 6; ++row) {
    const double at_one = pn[row * 6];
    for (std::size_t col = 1; col <= row; ++col) CHECK(at_one >= pn[row * 6 + col] - 1e-9);
  }
}

TEST_CASE("simulate is reproducible") {
  const std::string args = "simulate --d 6 --strategy random --steps 200000 --seed 0x2a";
  const Result a = cli(args);
  const Result b = cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto t = table(a.out);
  CHECK(t.numbers("seed")[0] == 42.0);
  CHECK(t.rows[0][t.column("strategy")] == "random");
  const Result d2 = cli("simulate --d 2 --strategy balanced --recycled --steps 1000000 --seed 7");
  const auto t2 = table(d2.out);
  CHECK(std::fabs(t2.numbers("rate")[0] - 0.5) <= 3 * t2.numbers("stderr")[0]);
}

TEST_CASE("config files") {
  const auto dir = scratch_dir("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# comment\nd = 6\nstrategy=balanced\nsteps=100000\nseed=9\n";
  const Result a = cli("simulate --config " + cfg.string());
  REQUIRE(a.status == 0);
  const auto t = table(a.out);
  CHECK(t.numbers("d")[0] == 6.0);
  CHECK(t.numbers("seed")[0] == 9.0);
  const Result b = cli("simulate --config " + cfg.string() + " --seed 10");
  CHECK(table(b.out).numbers("seed")[0] == 10.0);
  std::ofstream(dir / "bad.cfg") << "colour=blue\n";
  CHECK(cli("simulate --config " + (dir / "bad.cfg").string()).status == 2);
}

TEST_CASE("reproduce and fit") {
  const auto dir = scratch_dir("reproduce");
  REQUIRE(cli("reproduce fig6 --out-dir " + dir.string()).status == 0);
  std::ifstream f6(dir / "fig6.csv");
  const auto t6 = fockfusion::read_csv(f6);
  CHECK(t6.rows.size() == 400);
  CHECK(t6.numbers("success")[0] == doctest::Approx(0.5));

  REQUIRE(cli("reproduce fig8 --out-dir " + dir.string() +
              " --steps 100000 --d-min 4 --d-max 10 --d-step 2")
              .status == 0);
  const Result fit = cli("fit --input " + (dir / "fig8.csv").string() +
                         " --scheme balanced --d-min 4 --d-max 10");
  REQUIRE(fit.status == 0);
  const auto tf = table(fit.out);
  CHECK(tf.numbers("exponent")[0] < -1.0);
}

TEST_CASE("baseline") {
  const Result r = cli("baseline --scheme doubling --d-max 4");
  REQUIRE(r.status == 0);
  const auto t = table(r.out);
  bool seen = false;
  for (const auto& row : t.rows) {
    if (row[t.column("parameter")] == "expected_singles" && row[t.column("d")] == "4") {
      CHECK(std::stod(row[t.column("value")]) == doctest::Approx(64.0 / 3.0));
      seen = true;
    }
  }
  CHECK(seen);
}
