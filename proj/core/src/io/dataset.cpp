// Copyright 2026 The dailoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dailoc/io/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "dailoc/common/errors.hpp"

namespace dailoc::io {
namespace {

constexpr std::string_view kMagic = "#dailoc-fp";
constexpr std::string_view kVersion = "v1";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view text, const std::filesystem::path& path, std::size_t line,
               const char* field) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    parse_fail(path, line, std::string("invalid ") + field + " '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

const Point3& CoordinateTable::at(std::size_t rp) const {
  if (rp >= coords.size()) {
    throw MetricError("unknown RP index " + std::to_string(rp) + " (table has " +
                      std::to_string(coords.size()) + " RPs)");
  }
  return coords[rp];
}

double standardize_rss(double dbm) {
  if (!(dbm >= kRssFloorDbm && dbm <= kRssCeilingDbm)) {
    throw DataError("RSS " + std::to_string(dbm) + " dBm outside [-100, 0]");
  }
  return (dbm + 100.0) / 100.0;
}

double destandardize_rss(double normalized) { return normalized * 100.0 - 100.0; }

std::vector<double> standardize_rss(std::span<const double> dbm, std::uint64_t sample_id) {
  std::vector<double> out(dbm.size());
  for (std::size_t i = 0; i < dbm.size(); ++i) {
    if (!(dbm[i] >= kRssFloorDbm && dbm[i] <= kRssCeilingDbm)) {
      throw DataError("sample " + std::to_string(sample_id) + ", AP " + std::to_string(i) +
                      ": RSS " + std::to_string(dbm[i]) + " dBm outside [-100, 0]");
    }
    out[i] = (dbm[i] + 100.0) / 100.0;
  }
  return out;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_real: conversion failed");
  return std::string(buf, ptr);
}

void save_dataset(const std::filesystem::path& path, const FingerprintFile& file) {
  if (file.building_id.empty() || file.building_id.find_first_of(" ,\n") != std::string::npos) {
    throw SchemaError("building id must be a non-empty token without spaces or commas");
  }
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << " building=" << file.building_id << " aps=" << file.n_aps
      << '\n';
  for (const auto& r : file.records) {
    if (r.rss.size() != file.n_aps) {
      throw SchemaError("sample " + std::to_string(r.sample_id) + " has " +
                        std::to_string(r.rss.size()) + " RSS values, header declares " +
                        std::to_string(file.n_aps));
    }
    if (r.device_id.empty() || r.device_id.find_first_of(", \n") != std::string::npos) {
      throw SchemaError("device id '" + r.device_id + "' is not a valid token");
    }
    out << r.sample_id << ',' << r.device_id << ',' << r.epoch << ',';
    if (r.rp) {
      out << *r.rp;
    } else {
      out << '_';
    }
    for (double v : r.rss) out << ',' << format_real(v);
    out << '\n';
  }
  auto stream = open_for_write(path);
  stream << out.str();
  if (!stream) throw IoError("failed writing '" + path.string() + "'");
}

FingerprintFile load_dataset(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  FingerprintFile file;
  std::string raw;
  if (!std::getline(in, raw)) parse_fail(path, 1, "missing header");
  {
    const auto fields = split(strip_cr(raw), ' ');
    if (fields.size() != 4 || fields[0] != kMagic) parse_fail(path, 1, "bad header");
    if (fields[1] != kVersion) {
      parse_fail(path, 1, "unsupported version '" + std::string(fields[1]) + "'");
    }
    if (!fields[2].starts_with("building=") || !fields[3].starts_with("aps=")) {
      parse_fail(path, 1, "header must carry building= and aps=");
    }
    file.building_id = std::string(fields[2].substr(9));
    file.n_aps = parse_number<std::size_t>(fields[3].substr(4), path, 1, "AP count");
  }

  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    // Every written record ends in a newline; a bare last line was cut short.
    if (in.eof()) parse_fail(path, line_no, "truncated record: missing end of line");
    const auto fields = split(line, ',');
    if (fields.size() < 4 + file.n_aps) {
      parse_fail(path, line_no,
                 "truncated record: expected " + std::to_string(file.n_aps) +
                     " RSS values, found " +
                     std::to_string(fields.size() < 4 ? 0 : fields.size() - 4));
    }
    if (fields.size() != 4 + file.n_aps) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": record has " +
                        std::to_string(fields.size() - 4) + " RSS values, header declares " +
                        std::to_string(file.n_aps));
    }
    FingerprintRecord r;
    r.sample_id = parse_number<std::uint64_t>(fields[0], path, line_no, "sample id");
    if (fields[1].empty()) parse_fail(path, line_no, "empty device id");
    r.device_id = std::string(fields[1]);
    r.epoch = parse_number<std::uint32_t>(fields[2], path, line_no, "epoch");
    if (fields[3] != "_") r.rp = parse_number<std::size_t>(fields[3], path, line_no, "RP label");
    r.rss.reserve(file.n_aps);
    for (std::size_t i = 0; i < file.n_aps; ++i) {
      const double v = parse_number<double>(fields[4 + i], path, line_no, "RSS value");
      if (!(v >= kRssFloorDbm && v <= kRssCeilingDbm)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": sample " +
                        std::to_string(r.sample_id) + ", AP " + std::to_string(i) + ": RSS " +
                        std::string(fields[4 + i]) + " dBm outside [-100, 0]");
      }
      r.rss.push_back(v);
    }
    file.records.push_back(std::move(r));
  }
  return file;
}

void save_coordinates(const std::filesystem::path& path, const CoordinateTable& table) {
  std::ostringstream out;
  for (std::size_t rp = 0; rp < table.coords.size(); ++rp) {
    const auto& p = table.coords[rp];
    out << rp << ',' << format_real(p.x) << ',' << format_real(p.y) << ',' << format_real(p.z)
        << '\n';
  }
  auto stream = open_for_write(path);
  stream << out.str();
  if (!stream) throw IoError("failed writing '" + path.string() + "'");
}

CoordinateTable load_coordinates(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  CoordinateTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) parse_fail(path, line_no, "expected rp_id,x,y,z");
    const auto rp = parse_number<std::size_t>(fields[0], path, line_no, "RP id");
    if (rp != table.coords.size()) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": RP ids must be dense and ascending from 0");
    }
    table.coords.push_back({parse_number<double>(fields[1], path, line_no, "x"),
                            parse_number<double>(fields[2], path, line_no, "y"),
                            parse_number<double>(fields[3], path, line_no, "z")});
  }
  return table;
}

}  // namespace dailoc::io
