#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "ecggin/dataset.hpp"
#include "ecggin/error.hpp"

namespace ecggin {

namespace {

double parse_real(std::string_view field, std::size_t row, std::size_t col) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size() || field.empty()) {
    throw RowError(ErrorCode::ParseError, row, fmt::format("column {}: cannot parse '{}' as a number", col, field));
  }
  return value;
}

}  // namespace

std::vector<Beat> parse_beats(std::istream& in, std::size_t expected_len, const std::string& source) {
  std::vector<Beat> beats;
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != expected_len + 1) {
      throw RowError(ErrorCode::LengthMismatch, row,
                     fmt::format("{} columns, expected {} samples plus a label", fields.size(), expected_len));
    }

    Beat beat;
    beat.samples.reserve(expected_len);
    for (std::size_t c = 0; c < expected_len; ++c) {
      const double v = parse_real(fields[c], row, c + 1);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw RowError(ErrorCode::RangeError, row, fmt::format("column {}: amplitude {} outside [0, 1]", c + 1, v));
      }
      beat.samples.push_back(v);
    }
    const double label = parse_real(fields.back(), row, expected_len + 1);
    if (!(label >= 0.0) || label != std::floor(label) || label > 1e6) {
      throw RowError(ErrorCode::ParseError, row, fmt::format("label {} is not a non-negative integer", label));
    }
    beat.label = static_cast<int>(label);
    beat.source_id = fmt::format("{}:{}", source.empty() ? "row" : source, row);
    beats.push_back(std::move(beat));
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed");
  return beats;
}

std::vector<Beat> load_beats(const std::string& path, std::size_t expected_len) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", path));
  return parse_beats(in, expected_len, path);
}

TimeSeries parse_record(std::istream& in, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("sample rate {} must be positive", sample_rate_hz));
  }
  TimeSeries record;
  record.sample_rate_hz = sample_rate_hz;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const double v = parse_real(line, row, 1);
    if (!std::isfinite(v)) throw RowError(ErrorCode::ParseError, row, fmt::format("sample {} is not finite", v));
    record.values.push_back(v);
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed");
  return record;
}

TimeSeries load_record(const std::string& path, double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", path));
  return parse_record(in, sample_rate_hz);
}

void write_beats(std::span<const Beat> beats, std::ostream& out) {
  std::string line;
  for (const Beat& b : beats) {
    line.clear();
    for (double v : b.samples) {
      fmt::format_to(std::back_inserter(line), "{},", v);
    }
    fmt::format_to(std::back_inserter(line), "{}\n", b.label);
    out << line;
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write of beat corpus failed");
}

}  // namespace ecggin
