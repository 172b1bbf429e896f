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

#pragma once

// Self-describing CSV: one '#' manifest comment line, a header row, then data.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fockfusion/growth_sim.hpp"

namespace fockfusion {

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

std::string library_version();

struct RunManifest {
  std::vector<std::string> command;  ///< argv, program name excluded
  std::string config_digest;         ///< digest of the config file text, empty without one
  std::optional<std::uint64_t> seed;
  std::string version = library_version();
  std::vector<std::string> outputs;
  std::string started;   ///< UTC timestamps; kept out of CSV bodies
  std::string finished;

  /// Digest over everything except timestamps, so it is reproducible.
  std::string digest() const;
  /// "# fockfusion <version> manifest=<digest> seed=<seed> args=<...>"
  std::string comment_line() const;
  /// key=value text for a sidecar file, timestamps included.
  std::string sidecar() const;
};

/// Shortest decimal that round-trips through strtod.
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const RunManifest& manifest, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> comments;  ///< without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> numbers(std::string_view name) const;
};

/// Comma-separated, no quoting. Throws std::runtime_error on ragged rows.
CsvTable read_csv(std::istream& in);

/// d,strategy,recycled,source_size,steps,burn_in,seed,harvested,rate,stderr
std::vector<std::string> rate_header();
std::vector<std::string> rate_row(const SimConfig& config, const RateEstimate& estimate);

/// scheme,parameter,d,value
std::vector<std::string> baseline_header();

}  // namespace fockfusion
