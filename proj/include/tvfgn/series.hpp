#pragma once

// Time series ingestion: one- or two-column CSV (value, or time,value), with
// an optional header row and '#' comments.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/stats.hpp"

namespace tvfgn {

struct Standardization {
  double mean = 0.0;
  double sd = 1.0;
};

struct SeriesData {
  std::vector<double> timestamps;
  std::vector<double> values;
  Standardization standardization;  ///< identity until standardized()
  std::string source;
  bool unit_spacing = false;  ///< timestamps were implied (1..n)

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

  void validate() const {
    if (timestamps.size() != values.size()) throw IngestionError("series: timestamps and values differ in length");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw IngestionError("series: non-finite value at index " + std::to_string(i));
      if (!std::isfinite(timestamps[i])) throw IngestionError("series: non-finite time at index " + std::to_string(i));
      if (i > 0 && !(timestamps[i] > timestamps[i - 1]))
        throw IngestionError("series: timestamps not strictly increasing at index " + std::to_string(i));
    }
  }

  /// Copy centred and scaled to unit sample sd, recording the transform.
  [[nodiscard]] SeriesData standardized() const {
    if (values.size() < 2) throw IngestionError("series: need at least two observations");
    const auto ms = mean_sd(values);
    if (!(ms.sd > 0.0)) throw IngestionError("series: constant series cannot be standardized");
    SeriesData out = *this;
    for (double& v : out.values) v = (v - ms.mean) / ms.sd;
    out.standardization = {ms.mean, ms.sd};
    return out;
  }

  [[nodiscard]] double destandardize(double z) const { return standardization.mean + standardization.sd * z; }
  [[nodiscard]] double destandardize_scale(double z) const { return standardization.sd * z; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  const char delim = line.find(',') != std::string::npos ? ',' : (line.find(';') != std::string::npos ? ';' : '\t');
  std::vector<std::string> out;
  if (delim == '\t' && line.find('\t') == std::string::npos) {
    // whitespace separated
    std::istringstream is(line);
    std::string f;
    while (is >> f) out.push_back(f);
    return out;
  }
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

/// Strict decimal parse: whole field must be consumed. Returns nothing when
/// the text is not numeric at all; NaN/Inf spellings parse (and are rejected
/// by the caller with a row number).
inline std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    if (text == "NA" || text == "na" || text == "NULL") return std::numeric_limits<double>::quiet_NaN();
    return std::nullopt;
  }
  return v;
}

}  // namespace detail

/// Reads a series. Row numbers in error messages are 1-based file lines.
inline SeriesData read_series_csv(std::istream& in, const std::string& source = "<stream>") {
  SeriesData s;
  s.source = source;
  std::string line;
  int row = 0;
  int columns = 0;
  bool seen_data = false;
  auto fail = [&](const std::string& what) { throw IngestionError(source + ": row " + std::to_string(row) + ": " + what); };
  while (std::getline(in, line)) {
    ++row;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = detail::split_fields(t);
    if (fields.size() > 2) fail("expected one (value) or two (time,value) columns, found " + std::to_string(fields.size()));
    std::vector<std::optional<double>> nums;
    for (const auto& f : fields) nums.push_back(detail::parse_number(f));
    const bool numeric = std::all_of(nums.begin(), nums.end(), [](const auto& v) { return v.has_value(); });
    if (!numeric) {
      const bool header = std::none_of(nums.begin(), nums.end(), [](const auto& v) { return v.has_value(); }) &&
                          std::none_of(fields.begin(), fields.end(), [](const auto& f) { return f.empty(); });
      if (header && !seen_data && columns == 0) {
        columns = static_cast<int>(fields.size());  // header row
        continue;
      }
      fail("unparseable number");
    }
    if (columns == 0) columns = static_cast<int>(fields.size());
    if (static_cast<int>(fields.size()) != columns) fail("inconsistent column count");
    seen_data = true;
    const double value = *nums.back();
    if (!std::isfinite(value)) fail("non-finite value");
    double time = static_cast<double>(s.values.size() + 1);
    if (columns == 2) {
      time = *nums.front();
      if (!std::isfinite(time)) fail("non-finite time");
      if (!s.timestamps.empty() && !(time > s.timestamps.back())) fail("time not strictly increasing");
    }
    s.timestamps.push_back(time);
    s.values.push_back(value);
  }
  if (s.values.empty()) throw IngestionError(source + ": no data rows");
  s.unit_spacing = columns == 1;
  return s;
}

inline SeriesData read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path);
  return read_series_csv(in, path);
}

inline void write_series_csv(std::ostream& os, std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size()) throw ArgumentError("write_series_csv: length mismatch");
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << "time,value\n";
  for (std::size_t i = 0; i < v.size(); ++i) os << t[i] << ',' << v[i] << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace tvfgn
