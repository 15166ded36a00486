#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tvfgn/error.hpp"

namespace tvfgn {

namespace detail {

/// Linear-interpolation quantile of already sorted data.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * sorted[lo] + t * sorted[hi];
}

}  // namespace detail

inline double quantile(std::vector<double> values, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile: level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  return detail::sorted_quantile(values, q);
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

inline MeanSd mean_sd(std::span<const double> x) {
  if (x.size() < 2) throw ArgumentError("mean_sd: need at least two values");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(x.size() - 1))};
}

/// Centres to mean zero and scales to unit sample standard deviation.
inline std::vector<double> standardize(std::span<const double> x) {
  const auto ms = mean_sd(x);
  if (!(ms.sd > 0.0)) throw ArgumentError("standardize: series is constant");
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v = (v - ms.mean) / ms.sd;
  return out;
}

}  // namespace tvfgn
