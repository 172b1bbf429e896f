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

#include "fockfusion/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fockfusion {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string library_version() { return FOCKFUSION_VERSION; }

namespace {

std::string joined_args(const std::vector<std::string>& args) {
  std::string out;
  for (const std::string& a : args) {
    if (!out.empty()) {
      out += ' ';
    }
    out += a;
  }
  return out;
}

}  // namespace

std::string RunManifest::digest() const {
  std::string text = "version=" + version + "\nargs=" + joined_args(command) +
                     "\nconfig=" + config_digest + "\nseed=";
  if (seed) {
    text += std::to_string(*seed);
  }
  for (const std::string& o : outputs) {
    text += "\noutput=" + o;
  }
  return fnv1a_hex(text);
}

std::string RunManifest::comment_line() const {
  std::string line = "# fockfusion " + version + " manifest=" + digest();
  if (seed) {
    line += " seed=" + std::to_string(*seed);
  }
  if (!config_digest.empty()) {
    line += " config=" + config_digest;
  }
  line += " args=" + joined_args(command);
  return line;
}

std::string RunManifest::sidecar() const {
  std::ostringstream s;
  s << "manifest=" << digest() << '\n'
    << "version=" << version << '\n'
    << "args=" << joined_args(command) << '\n'
    << "config_digest=" << config_digest << '\n'
    << "seed=" << (seed ? std::to_string(*seed) : std::string()) << '\n';
  for (const std::string& o : outputs) {
    s << "output=" << o << '\n';
  }
  s << "started=" << started << '\n' << "finished=" << finished << '\n';
  return s.str();
}

std::string format_number(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const RunManifest& manifest,
                     std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  out_ << manifest.comment_line() << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error("CSV row width does not match the header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      out_ << ',';
    }
    out_ << cells[i];
  }
  out_ << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw std::out_of_range("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    double v = 0.0;
    const std::string& cell = r[c];
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      throw std::runtime_error("CSV column '" + std::string(name) + "' has non-numeric cell '" +
                               cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      table.comments.push_back(line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        throw std::runtime_error("ragged CSV row: " + line);
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) {
    throw std::runtime_error("CSV has no header row");
  }
  return table;
}

std::vector<std::string> rate_header() {
  return {"d",     "strategy", "recycled",  "source_size", "steps",
          "burn_in", "seed",   "harvested", "rate",        "stderr"};
}

std::vector<std::string> rate_row(const SimConfig& config, const RateEstimate& estimate) {
  return {std::to_string(config.d),
          config.strategy.name(),
          config.recycled ? "1" : "0",
          std::to_string(config.source_size),
          std::to_string(estimate.steps),
          std::to_string(estimate.burn_in),
          std::to_string(config.seed),
          std::to_string(estimate.harvested),
          format_number(estimate.rate),
          format_number(estimate.std_error)};
}

std::vector<std::string> baseline_header() { return {"scheme", "parameter", "d", "value"}; }

}  // namespace fockfusion
