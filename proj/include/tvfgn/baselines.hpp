#pragma once

// Classical comparison indicators: sliding-window Hurst estimates, Kendall's
// trend statistic with Monte Carlo null quantiles, and DFA.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/fgn.hpp"
#include "tvfgn/optimize.hpp"
#include "tvfgn/parallel.hpp"
#include "tvfgn/stats.hpp"

namespace tvfgn {

struct SlidingEstimates {
  int w = 0;
  std::vector<double> centres;                  ///< window centre, 0-based index units
  std::vector<std::optional<double>> estimates;  ///< empty for skipped (constant) windows

  [[nodiscard]] std::size_t windows() const noexcept { return estimates.size(); }
  [[nodiscard]] std::size_t gaps() const {
    return static_cast<std::size_t>(std::count_if(estimates.begin(), estimates.end(), [](const auto& e) { return !e; }));
  }
  [[nodiscard]] std::vector<double> valid_estimates() const {
    std::vector<double> out;
    for (const auto& e : estimates)
      if (e) out.push_back(*e);
    return out;
  }
};

namespace detail {

/// Durbin-Levinson innovation filters of fGn(H) for one window length,
/// packed row by row: row t holds the t prediction coefficients in
/// chronological order so that e_t = x_t - row_t . x[0..t).
struct InnovationFilter {
  std::vector<double> coeff;
  std::vector<double> inv_var;
  double log_det = 0.0;

  InnovationFilter(double h, std::size_t w) : coeff(w * (w - 1) / 2), inv_var(w) {
    const auto r = fgn_acf(h, w);
    std::vector<double> phi(w, 0.0);
    double v = 1.0;
    inv_var[0] = 1.0;
    log_det = 0.0;
    for (std::size_t t = 1; t < w; ++t) {
      double acc = r[t];
      for (std::size_t j = 1; j < t; ++j) acc -= phi[j] * r[t - j];
      const double k = acc / v;
      for (std::size_t j = 1, jj = t - 1; j <= jj; ++j, --jj) {
        const double a = phi[j], b = phi[jj];
        phi[j] = a - k * b;
        if (j != jj) phi[jj] = b - k * a;
      }
      phi[t] = k;
      v *= (1.0 - k * k);
      if (!(v > 0.0)) throw NumericalError("window_hurst: fGn covariance is not positive definite");
      double* row = coeff.data() + t * (t - 1) / 2;
      for (std::size_t i = 0; i < t; ++i) row[i] = phi[t - i];
      inv_var[t] = 1.0 / v;
      log_det += std::log(v);
    }
  }

  /// x' R^{-1} x for a window of the filter's length.
  [[nodiscard]] double quad_form(const double* x) const {
    const std::size_t w = inv_var.size();
    double q = x[0] * x[0] * inv_var[0];
    for (std::size_t t = 1; t < w; ++t) {
      const Eigen::Map<const Eigen::VectorXd> row(coeff.data() + t * (t - 1) / 2, static_cast<Eigen::Index>(t));
      const Eigen::Map<const Eigen::VectorXd> past(x, static_cast<Eigen::Index>(t));
      const double e = x[t] - row.dot(past);
      q += e * e * inv_var[t];
    }
    return q;
  }
};

/// Filters keyed by H. Golden-section abscissae form a fixed binary tree
/// from the common bracket, so windows (and replicates) keep revisiting the
/// same H values. Once the byte budget is spent, misses are computed
/// without being stored.
class InnovationCache {
 public:
  static constexpr std::size_t kDefaultBytes = std::size_t{512} << 20;

  explicit InnovationCache(std::size_t w, std::size_t max_bytes = kDefaultBytes) : w_(w), max_bytes_(max_bytes) {}

  [[nodiscard]] std::size_t window() const noexcept { return w_; }
  [[nodiscard]] std::size_t entries() const noexcept { return filters_.size(); }

  const InnovationFilter& get(double h, std::optional<InnovationFilter>& scratch) {
    auto it = filters_.find(h);
    if (it != filters_.end()) return it->second;
    const std::size_t bytes = (w_ * (w_ - 1) / 2 + w_) * sizeof(double);
    if (bytes_ + bytes <= max_bytes_) {
      bytes_ += bytes;
      return filters_.emplace(h, InnovationFilter(h, w_)).first->second;
    }
    scratch.emplace(h, w_);
    return *scratch;
  }

 private:
  std::size_t w_;
  std::size_t max_bytes_;
  std::size_t bytes_ = 0;
  std::map<double, InnovationFilter> filters_;
};

inline constexpr double kWindowTolerance = 1e-3;

}  // namespace detail

/// Profile-likelihood Hurst estimate of one window (sample mean removed,
/// precision profiled out), maximized over [0.50, 0.99] by golden-section
/// search. Returns nothing for a constant window.
inline std::optional<double> window_mle(std::span<const double> x, detail::InnovationCache& cache) {
  const std::size_t w = x.size();
  if (w != cache.window()) throw ArgumentError("window_mle: cache built for a different window length");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  if (!(*hi - *lo > 1e-12 * std::max(scale, 1e-300))) return std::nullopt;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(w);
  std::vector<double> centred(x.begin(), x.end());
  for (double& v : centred) v -= mean;
  std::optional<detail::InnovationFilter> scratch;
  auto negative_profile = [&](double h) {
    const auto& f = cache.get(h, scratch);
    const double q = f.quad_form(centred.data());
    return 0.5 * f.log_det + 0.5 * static_cast<double>(w) * std::log(q / static_cast<double>(w));
  };
  return optimize::golden_section(negative_profile, HurstExponent::kMin, HurstExponent::kMax, detail::kWindowTolerance).x;
}

/// Per-window Hurst MLE over the p = n - w windows starting at 0..p-1.
inline SlidingEstimates window_hurst(std::span<const double> y, int w, detail::InnovationCache* cache = nullptr) {
  const int n = static_cast<int>(y.size());
  if (w < 10 || w >= n) throw ArgumentError("window_hurst: need 10 <= w < n");
  std::optional<detail::InnovationCache> local;
  if (cache == nullptr || cache->window() != static_cast<std::size_t>(w)) {
    local.emplace(static_cast<std::size_t>(w));
    cache = &*local;
  }
  SlidingEstimates out;
  out.w = w;
  const int p = n - w;
  out.centres.resize(p);
  out.estimates.resize(p);
  for (int s = 0; s < p; ++s) {
    out.centres[s] = s + 0.5 * (w - 1);
    out.estimates[s] = window_mle(y.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(w)), *cache);
  }
  return out;
}

/// (concordant - discordant) / C(p,2); tied pairs count as neither.
inline double kendall_tau(std::span<const double> x) {
  const std::size_t p = x.size();
  if (p < 2) throw ArgumentError("kendall_tau: need at least two values");
  long long score = 0;
  for (std::size_t i = 0; i + 1 < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) score += (x[j] > x[i]) - (x[j] < x[i]);
  return static_cast<double>(score) / (0.5 * static_cast<double>(p) * static_cast<double>(p - 1));
}

/// Kendall's tau of the valid window estimates against time.
inline double kendall_tau(const SlidingEstimates& est) { return kendall_tau(est.valid_estimates()); }

/// Default baseline window: a quarter of the series.
inline int default_window(int n) { return n / 4; }

/// Upper `level` quantile of tau_K under stationary fGn(H0).
inline double tau_null_quantile(int n, int w, HurstExponent h0, double level, int reps, std::uint64_t seed, unsigned threads = 1) {
  if (reps < 500) throw ArgumentError("tau_null_quantile: at least 500 replicates required");
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("tau_null_quantile: level must lie in (0,1)");
  if (w < 10 || w >= n) throw ArgumentError("tau_null_quantile: need 10 <= w < n");
  std::vector<double> taus(static_cast<std::size_t>(reps));
  const unsigned workers = std::max(1u, std::min<unsigned>(threads == 0 ? default_thread_count() : threads, static_cast<unsigned>(reps)));
  // one cache per worker lane; replicate r always uses lane r % workers
  std::vector<detail::InnovationCache> caches(
      workers, detail::InnovationCache(static_cast<std::size_t>(w), detail::InnovationCache::kDefaultBytes / workers));
  parallel_for(workers, workers, [&](std::size_t lane) {
    for (std::size_t r = lane; r < taus.size(); r += workers) {
      const auto y = simulate_fgn(h0, static_cast<std::size_t>(n), derive_seed(seed, r)).values;
      taus[r] = kendall_tau(window_hurst(y, w, &caches[lane]));
    }
  });
  return quantile(std::move(taus), level);
}

struct DfaOptions {
  int min_scale = 10;
  int max_scale = 0;  ///< 0: n / 10
  int scales = 20;    ///< requested log-spaced scales (duplicates after rounding dropped)
};

struct DfaResult {
  double hurst = 0.0;
  std::vector<int> scales;
  std::vector<double> fluctuation;
};

/// DFA-1: slope of log F(s) on log s over log-spaced box sizes.
inline DfaResult dfa(std::span<const double> y, const DfaOptions& opt = {}) {
  const int n = static_cast<int>(y.size());
  if (n < 200) throw ArgumentError("dfa_hurst: need at least 200 observations");
  const int smin = std::max(opt.min_scale, 4);
  const int smax = opt.max_scale > 0 ? std::min(opt.max_scale, n / 2) : n / 10;
  if (opt.scales < 2) throw ArgumentError("dfa_hurst: need at least two requested scales");

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  std::vector<double> profile(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) profile[i] = acc += y[i] - mean;

  std::vector<int> scales;
  if (smax >= smin) {
    for (int k = 0; k < opt.scales; ++k) {
      const double s = smin * std::pow(static_cast<double>(smax) / smin, static_cast<double>(k) / (opt.scales - 1));
      const int si = static_cast<int>(std::lround(s));
      if (scales.empty() || si != scales.back()) scales.push_back(si);
    }
  }

  DfaResult out;
  for (int s : scales) {
    const int boxes = n / s;
    if (boxes < 2) continue;
    // least squares on x = 0..s-1 within each box
    const double xm = 0.5 * (s - 1);
    double sxx = 0.0;
    for (int i = 0; i < s; ++i) sxx += (i - xm) * (i - xm);
    double total = 0.0;
    for (int b = 0; b < boxes; ++b) {
      const double* seg = profile.data() + static_cast<std::ptrdiff_t>(b) * s;
      double ym = 0.0, sxy = 0.0;
      for (int i = 0; i < s; ++i) ym += seg[i];
      ym /= s;
      for (int i = 0; i < s; ++i) sxy += (i - xm) * (seg[i] - ym);
      const double slope = sxy / sxx;
      for (int i = 0; i < s; ++i) {
        const double r = seg[i] - ym - slope * (i - xm);
        total += r * r;
      }
    }
    const double f = std::sqrt(total / (static_cast<double>(boxes) * s));
    if (f > 0.0 && std::isfinite(f)) {
      out.scales.push_back(s);
      out.fluctuation.push_back(f);
    }
  }
  if (out.scales.size() < 4) throw ArgumentError("dfa_hurst: fewer than 4 usable scales");

  const std::size_t k = out.scales.size();
  double lx = 0.0, ly = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    lx += std::log(out.scales[i]);
    ly += std::log(out.fluctuation[i]);
  }
  lx /= k;
  ly /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(out.scales[i]) - lx;
    sxy += dx * (std::log(out.fluctuation[i]) - ly);
    sxx += dx * dx;
  }
  out.hurst = sxy / sxx;
  return out;
}

inline double dfa_hurst(std::span<const double> y, const DfaOptions& opt = {}) { return dfa(y, opt).hurst; }

}  // namespace tvfgn
