#pragma once

// Time-varying mixture of two fGn processes: weight function, logistic
// standard deviation, exact simulation and covariance, the Markov (stacked
// AR(1)) precision, interpolation onto irregular observation times and the
// KLD-based weight to Hurst mapping.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvfgn/ar1_cascade.hpp"
#include "tvfgn/error.hpp"
#include "tvfgn/fgn.hpp"
#include "tvfgn/optimize.hpp"
#include "tvfgn/parallel.hpp"

namespace tvfgn {

/// Fixed high precision of the small noise that makes the stacked vector
/// non-singular.
inline const double kTauHigh = std::exp(15.0);

namespace detail {

inline void require_increasing(std::span<const double> t, const char* who) {
  if (t.size() < 2) throw ArgumentError(std::string(who) + ": need at least two timestamps");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw ArgumentError(std::string(who) + ": non-finite timestamp");
    if (i > 0 && !(t[i] > t[i - 1])) throw ArgumentError(std::string(who) + ": timestamps must be strictly increasing");
  }
}

}  // namespace detail

/// Mixing weight w(t_i) in [0,1] at each timestamp.
struct WeightFunction {
  std::vector<double> t;
  std::vector<double> w;
  [[nodiscard]] std::size_t size() const noexcept { return w.size(); }
};

inline WeightFunction linear_weight(std::span<const double> timestamps) {
  detail::require_increasing(timestamps, "linear_weight");
  WeightFunction out;
  out.t.assign(timestamps.begin(), timestamps.end());
  out.w.resize(timestamps.size());
  const double t0 = timestamps.front();
  const double span = timestamps.back() - t0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) out.w[i] = (timestamps[i] - t0) / span;
  out.w.front() = 0.0;
  out.w.back() = 1.0;
  return out;
}

/// Linear weight on unit-spaced times 1..n.
inline WeightFunction linear_weight(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i + 1);
  return linear_weight(t);
}

/// User-tabulated weights (the hook for nonlinear weight shapes).
inline WeightFunction tabulated_weight(std::span<const double> timestamps, std::span<const double> w) {
  detail::require_increasing(timestamps, "tabulated_weight");
  if (w.size() != timestamps.size()) throw ArgumentError("tabulated_weight: length mismatch");
  for (double x : w)
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("tabulated_weight: weights must lie in [0,1]");
  return {std::vector<double>(timestamps.begin(), timestamps.end()), std::vector<double>(w.begin(), w.end())};
}

/// sigma(t_i) = 1/2 + logistic(beta * (relative time - 1/2)).
inline std::vector<double> sigma_logistic(double beta, std::span<const double> timestamps) {
  detail::require_increasing(timestamps, "sigma_logistic");
  if (!std::isfinite(beta)) throw ArgumentError("sigma_logistic: beta must be finite");
  const double t0 = timestamps.front();
  const double span = timestamps.back() - t0;
  std::vector<double> out(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double u = (timestamps[i] - t0) / span - 0.5;
    out[i] = 0.5 + 1.0 / (1.0 + std::exp(-beta * u));
  }
  // exact at the midpoint regardless of rounding in u
  for (std::size_t i = 0; i < timestamps.size(); ++i)
    if (2.0 * timestamps[i] == timestamps.front() + timestamps.back()) out[i] = 1.0;
  return out;
}

struct MixtureSpec {
  HurstExponent h1{0.6};
  HurstExponent h2{0.8};
  double tau = 1.0;
  WeightFunction weight;
  std::optional<double> beta;
  int m = 4;

  [[nodiscard]] std::size_t n() const noexcept { return weight.size(); }

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("MixtureSpec: tau must be positive and finite");
    if (weight.size() < 2 || weight.t.size() != weight.w.size()) throw ArgumentError("MixtureSpec: weight function needs at least two points");
    if (m != 3 && m != 4) throw ArgumentError("MixtureSpec: m must be 3 or 4");
    if (beta && !std::isfinite(*beta)) throw ArgumentError("MixtureSpec: beta must be finite");
  }

  /// sigma(t_i), all ones when beta is absent.
  [[nodiscard]] std::vector<double> sigma() const {
    if (!beta) return std::vector<double>(n(), 1.0);
    return sigma_logistic(*beta, weight.t);
  }
};

/// Convenience: linear weight over unit-spaced times.
inline MixtureSpec make_mixture(double h1, double h2, std::size_t n, double tau = 1.0, std::optional<double> beta = std::nullopt, int m = 4) {
  MixtureSpec s{HurstExponent(h1), HurstExponent(h2), tau, linear_weight(n), beta, m};
  s.validate();
  return s;
}

/// Exact draw: two independent fGn series combined with weights sqrt(1-w) and
/// sqrt(w), scaled by sigma(t)/sqrt(tau). The series index is the time index.
inline std::vector<double> simulate_mixture(const MixtureSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.n();
  const auto x1 = simulate_fgn(spec.h1, n, derive_seed(seed, 1)).values;
  const auto x2 = simulate_fgn(spec.h2, n, derive_seed(seed, 2)).values;
  const auto sig = spec.sigma();
  const double scale = 1.0 / std::sqrt(spec.tau);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = spec.weight.w[i];
    out[i] = sig[i] * scale * (std::sqrt(1.0 - w) * x1[i] + std::sqrt(w) * x2[i]);
  }
  return out;
}

inline constexpr std::size_t kDenseGuard = 2000;

/// Covariance of the generative mixture: tau^-1 sigma_i sigma_j
/// [sqrt((1-w_i)(1-w_j)) rho_H1 + sqrt(w_i w_j) rho_H2] at lag |i-j|.
inline Eigen::MatrixXd mixture_covariance(const MixtureSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n();
  if (n > kDenseGuard) throw ArgumentError("mixture_covariance: n > 2000; use the sparse stacked precision instead");
  const auto r1 = detail::fgn_acf(spec.h1.value(), n);
  const auto r2 = detail::fgn_acf(spec.h2.value(), n);
  const auto sig = spec.sigma();
  const auto& w = spec.weight.w;
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t k = i - j;
      const double v = (std::sqrt((1.0 - w[i]) * (1.0 - w[j])) * r1[k] + std::sqrt(w[i] * w[j]) * r2[k]) * sig[i] * sig[j] / spec.tau;
      c(i, j) = c(j, i) = v;
    }
  }
  return c;
}

/// Same form with the cascade ACFs in place of the exact fGn ACFs: the
/// covariance implied for the latent component by the Markov representation
/// (without the small tau_h noise).
inline Eigen::MatrixXd cascade_mixture_covariance(const MixtureSpec& spec, const CoefficientTable& table) {
  spec.validate();
  const std::size_t n = spec.n();
  if (n > kDenseGuard) throw ArgumentError("cascade_mixture_covariance: n > 2000");
  const auto r1 = table.lookup(spec.h1).acf_vector(n);
  const auto r2 = table.lookup(spec.h2).acf_vector(n);
  const auto sig = spec.sigma();
  const auto& w = spec.weight.w;
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t k = i - j;
      c(i, j) = c(j, i) = (std::sqrt((1.0 - w[i]) * (1.0 - w[j])) * r1[k] + std::sqrt(w[i] * w[j]) * r2[k]) * sig[i] * sig[j] / spec.tau;
    }
  return c;
}

/// Lower-triangle entry sink used by precision assembly. The emission order
/// is a pure function of the model structure, so the same sequence of
/// positions is produced for every hyperparameter value.
struct TripletSink {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> values;
  bool record_positions = true;

  void clear() {
    rows.clear();
    cols.clear();
    values.clear();
  }
  void add(int r, int c, double v) {
    if (r < c) std::swap(r, c);
    if (record_positions) {
      rows.push_back(r);
      cols.push_back(c);
    }
    values.push_back(v);
  }
};

namespace detail {

/// Emits the lower triangle of Q_u for u = (eps, Z1, Z2) starting at `off`.
/// eps has dimension M = spec.n(); the Z blocks are ordered component-major.
inline void emit_stacked_precision(TripletSink& sink, int off, const MixtureSpec& spec, const CascadeCoefficients& c1, const CascadeCoefficients& c2) {
  const int n = static_cast<int>(spec.n());
  const int m = spec.m;
  const double s = 1.0 / std::sqrt(spec.tau);
  const double th = kTauHigh;
  const auto sig = spec.sigma();
  const auto& w = spec.weight.w;
  const CascadeCoefficients* cs[2] = {&c1, &c2};
  auto zidx = [&](int i, int j, int t) { return off + n + (i * m + j) * n + t; };
  std::vector<double> a(static_cast<std::size_t>(2 * m));
  for (int t = 0; t < n; ++t) {
    const double d[2] = {std::sqrt(1.0 - w[t]) * sig[t], std::sqrt(w[t]) * sig[t]};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < m; ++j) a[i * m + j] = std::sqrt(cs[i]->v[j]) * d[i];
    sink.add(off + t, off + t, th);
    for (int k = 0; k < 2 * m; ++k) sink.add(zidx(k / m, k % m, t), off + t, -s * th * a[k]);
    for (int k = 0; k < 2 * m; ++k) {
      for (int l = 0; l <= k; ++l) {
        double v = s * s * th * a[k] * a[l];
        if (k == l) {
          const double phi = cs[k / m]->phi[k % m];
          const double q = 1.0 / (1.0 - phi * phi);
          v += (t == 0 || t == n - 1) ? q : q * (1.0 + phi * phi);
        }
        sink.add(zidx(k / m, k % m, t), zidx(l / m, l % m, t), v);
      }
    }
    if (t + 1 < n) {
      for (int k = 0; k < 2 * m; ++k) {
        const double phi = cs[k / m]->phi[k % m];
        sink.add(zidx(k / m, k % m, t + 1), zidx(k / m, k % m, t), -phi / (1.0 - phi * phi));
      }
    }
  }
}

/// log|Q_u| = M log tau_h + sum over the 2m AR(1) blocks of log|Q_phi|.
inline double stacked_log_det(std::size_t n, const CascadeCoefficients& c1, const CascadeCoefficients& c2) {
  const double nd = static_cast<double>(n);
  double acc = nd * std::log(kTauHigh);
  for (const auto* c : {&c1, &c2})
    for (double phi : c->phi) acc -= (nd - 1.0) * std::log1p(-phi * phi);
  return acc;
}

}  // namespace detail

/// Sparse precision of the stacked vector (eps, Z1, Z2).
struct StackedPrecision {
  Eigen::SparseMatrix<double> matrix;  ///< full symmetric storage
  std::size_t n = 0;
  int m = 0;
  double log_det = 0.0;
  CascadeCoefficients c1, c2;

  [[nodiscard]] std::size_t dimension() const noexcept { return n + 2 * static_cast<std::size_t>(m) * n; }
};

inline StackedPrecision stacked_precision(const MixtureSpec& spec, const CoefficientTable& table) {
  spec.validate();
  if (table.m() != spec.m) throw ArgumentError("stacked_precision: table cascade size differs from spec.m");
  StackedPrecision out;
  out.n = spec.n();
  out.m = spec.m;
  out.c1 = table.lookup(spec.h1);
  out.c2 = table.lookup(spec.h2);
  TripletSink sink;
  detail::emit_stacked_precision(sink, 0, spec, out.c1, out.c2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * sink.values.size());
  for (std::size_t k = 0; k < sink.values.size(); ++k) {
    trip.emplace_back(sink.rows[k], sink.cols[k], sink.values[k]);
    if (sink.rows[k] != sink.cols[k]) trip.emplace_back(sink.cols[k], sink.rows[k], sink.values[k]);
  }
  const auto dim = static_cast<Eigen::Index>(out.dimension());
  out.matrix.resize(dim, dim);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(out.matrix);
  if (llt.info() != Eigen::Success) throw NumericalError("stacked_precision: Cholesky factorization failed");
  out.log_det = detail::stacked_log_det(out.n, out.c1, out.c2);
  return out;
}

/// Sparse interpolation from a regular latent grid to observation times.
struct InterpolationMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;  ///< n x M
  std::vector<double> grid;
  double step = 1.0;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(a.rows()); }
  [[nodiscard]] std::size_t grid_size() const noexcept { return grid.size(); }
};

inline InterpolationMatrix interpolation_matrix(std::span<const double> timestamps, double grid_step) {
  detail::require_increasing(timestamps, "interpolation_matrix");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw ArgumentError("interpolation_matrix: grid step must be positive");
  InterpolationMatrix out;
  out.step = grid_step;
  const double lo = std::floor(timestamps.front());
  const double hi = std::ceil(timestamps.back());
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step - 1e-9));
  const std::size_t big_m = std::max<std::size_t>(cells + 1, 2);
  out.grid.resize(big_m);
  for (std::size_t j = 0; j < big_m; ++j) out.grid[j] = lo + grid_step * static_cast<double>(j);
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < timestamps.size(); ++i) min_gap = std::min(min_gap, timestamps[i] - timestamps[i - 1]);
  if (grid_step > min_gap * (1.0 + 1e-12))
    out.warnings.push_back("grid step " + std::to_string(grid_step) + " exceeds the minimum observation gap " + std::to_string(min_gap) +
                           "; nearby observations share grid cells");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double pos = (timestamps[i] - lo) / grid_step;
    auto j = static_cast<std::size_t>(std::floor(pos));
    j = std::min(j, big_m - 1);
    const double frac = pos - static_cast<double>(j);
    const auto r = static_cast<int>(i);
    if (frac <= 1e-12 || j + 1 >= big_m) {
      trip.emplace_back(r, static_cast<int>(j), 1.0);
    } else if (frac >= 1.0 - 1e-12) {
      trip.emplace_back(r, static_cast<int>(j + 1), 1.0);
    } else {
      trip.emplace_back(r, static_cast<int>(j), 1.0 - frac);
      trip.emplace_back(r, static_cast<int>(j + 1), frac);
    }
  }
  out.a.resize(static_cast<Eigen::Index>(timestamps.size()), static_cast<Eigen::Index>(big_m));
  out.a.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// KLD-minimizing fGn Hurst exponent for the stationary mixture at fixed
/// weight w. Lengths above 1024 are capped.
inline HurstExponent kld_map_weight_to_hurst(double w, HurstExponent h1, HurstExponent h2, std::size_t n) {
  if (!(w >= 0.0 && w <= 1.0)) throw ArgumentError("kld_map_weight_to_hurst: w must lie in [0,1]");
  if (n < 2) throw ArgumentError("kld_map_weight_to_hurst: n must be at least 2");
  n = std::min<std::size_t>(n, 1024);
  const auto r1 = detail::fgn_acf(h1.value(), n);
  const auto r2 = detail::fgn_acf(h2.value(), n);
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = (1.0 - w) * r1[k] + w * r2[k];
  auto kld = [&](double h) { return stationary_kld(p, detail::fgn_acf(h, n)); };
  const double a = std::min(h1.value(), h2.value());
  const double b = std::max(h1.value(), h2.value());
  const double lo = std::max(HurstExponent::kMin, a - 0.02);
  const double hi = std::min(HurstExponent::kMax, b + 0.02);
  double best_h = a, best = kld(a);
  if (const double kb = kld(b); kb < best) {
    best = kb;
    best_h = b;
  }
  if (hi > lo && a != b) {
    const auto g = optimize::golden_section(kld, lo, hi, 1e-4);
    if (g.value < best) best_h = g.x;
  }
  return HurstExponent(std::clamp(best_h, HurstExponent::kMin, HurstExponent::kMax));
}

/// The map evaluated at each weight.
inline std::vector<double> kld_map_curve(std::span<const double> weights, HurstExponent h1, HurstExponent h2, std::size_t n) {
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = kld_map_weight_to_hurst(weights[i], h1, h2, n).value();
  return out;
}

}  // namespace tvfgn
