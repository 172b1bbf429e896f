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

#include <sstream>
#include <stdexcept>

#include "fockfusion/csv.hpp"

using namespace fockfusion;

TEST_CASE("fnv-1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, 0.0, -2.5}) {
    REQUIRE(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("manifest digest leaves out timestamps") {
  RunManifest a;
  a.command = {"simulate", "--d", "8"};
  a.seed = 4;
  RunManifest b = a;
  a.started = "2026-01-01T00:00:00Z";
  b.started = "2026-06-01T12:00:00Z";
  b.finished = "2026-06-01T12:05:00Z";
  CHECK(a.digest() == b.digest());
  CHECK(a.comment_line() == b.comment_line());
  CHECK(a.comment_line().rfind("# fockfusion ", 0) == 0);
  CHECK(a.sidecar() != b.sidecar());
  b.seed = 5;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("write then read") {
  RunManifest m;
  m.command = {"baseline"};
  std::stringstream ss;
  {
    CsvWriter w(ss, m, {"d", "value"});
    w.row({"4", format_number(64.0 / 3.0)});
    w.row({"8", "1e-05"});
    CHECK_THROWS_AS(w.row({"1"}), std::logic_error);
  }
  const CsvTable t = read_csv(ss);
  CHECK(t.comments.size() == 1);
  CHECK(t.header == std::vector<std::string>{"d", "value"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.numbers("value")[0] == 64.0 / 3.0);
  CHECK(t.numbers("d")[1] == 8.0);
  CHECK_THROWS_AS(t.column("rate"), std::out_of_range);
}

TEST_CASE("ragged rows are rejected") {
  std::istringstream in("# c\na,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(in), std::runtime_error);
}

TEST_CASE("rate rows match the header") {
  SimConfig c;
  c.d = 6;
  RateEstimate e;
  e.steps = 100;
  e.burn_in = 10;
  e.harvested = 9;
  e.rate = 0.1;
  CHECK(rate_row(c, e).size() == rate_header().size());
  CHECK(rate_header().front() == "d");
  CHECK(rate_header().back() == "stderr");
}
