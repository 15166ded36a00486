#pragma once

// Exact fractional Gaussian noise primitives: autocorrelation, Toeplitz
// covariance, simulation by circulant embedding, Durbin-Levinson
// log-density and the circulant-spectrum Kullback-Leibler divergence.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tvfgn/error.hpp"

namespace tvfgn {

/// Hurst exponent restricted to the long-memory range covered by the AR(1)
/// cascade tables.
class HurstExponent {
 public:
  static constexpr double kMin = 0.50;
  static constexpr double kMax = 0.99;

  explicit HurstExponent(double value) : value_(value) {
    if (!(value >= kMin && value <= kMax))
      throw ArgumentError("Hurst exponent " + std::to_string(value) + " outside [0.50, 0.99]");
  }

  [[nodiscard]] double value() const noexcept { return value_; }
  friend bool operator==(HurstExponent a, HurstExponent b) noexcept { return a.value_ == b.value_; }

 private:
  double value_;
};

namespace detail {

/// rho_H(k) for any real H in (0,1); lag 0 returns exactly 1.
inline double fgn_acf_at(double h, std::size_t k) {
  if (k == 0) return 1.0;
  const double two_h = 2.0 * h;
  const double kd = static_cast<double>(k);
  return 0.5 * (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) + std::pow(kd - 1.0, two_h));
}

inline std::vector<double> fgn_acf(double h, std::size_t n) {
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = fgn_acf_at(h, k);
  return r;
}

struct LevinsonResult {
  double log_det = 0.0;    ///< log |Sigma|
  double quad_form = 0.0;  ///< x' Sigma^{-1} x
};

/// Durbin-Levinson recursion for a stationary covariance with first row
/// `acov`: returns log|Sigma| and x'Sigma^{-1}x in O(n^2). `work` is
/// scratch space of at least n entries.
inline LevinsonResult levinson(std::span<const double> acov, std::span<const double> x, std::vector<double>& work) {
  const std::size_t n = x.size();
  if (acov.size() < n) throw ArgumentError("levinson: autocovariance shorter than data");
  work.assign(n, 0.0);
  double* phi = work.data();
  LevinsonResult out;
  double v = acov[0];
  if (!(v > 0.0)) throw NumericalError("levinson: non-positive variance");
  out.log_det = std::log(v);
  out.quad_form = x[0] * x[0] / v;
  for (std::size_t t = 1; t < n; ++t) {
    double acc = acov[t];
    for (std::size_t j = 1; j < t; ++j) acc -= phi[j] * acov[t - j];
    const double k = acc / v;
    for (std::size_t j = 1, jj = t - 1; j <= jj; ++j, --jj) {
      const double a = phi[j], b = phi[jj];
      phi[j] = a - k * b;
      if (j != jj) phi[jj] = b - k * a;
    }
    phi[t] = k;
    v *= (1.0 - k * k);
    if (!(v > 0.0)) throw NumericalError("levinson: covariance is not positive definite");
    double e = x[t];
    for (std::size_t j = 1; j <= t; ++j) e -= phi[j] * x[t - j];
    out.log_det += std::log(v);
    out.quad_form += e * e / v;
  }
  return out;
}

/// log|Sigma| only (used by the PC prior distance).
inline double levinson_log_det(std::span<const double> acov) {
  const std::size_t n = acov.size();
  std::vector<double> phi(n, 0.0);
  double v = acov[0];
  double log_det = std::log(v);
  for (std::size_t t = 1; t < n; ++t) {
    double acc = acov[t];
    for (std::size_t j = 1; j < t; ++j) acc -= phi[j] * acov[t - j];
    const double k = acc / v;
    for (std::size_t j = 1, jj = t - 1; j <= jj; ++j, --jj) {
      const double a = phi[j], b = phi[jj];
      phi[j] = a - k * b;
      if (j != jj) phi[jj] = b - k * a;
    }
    phi[t] = k;
    v *= (1.0 - k * k);
    if (!(v > 0.0)) throw NumericalError("levinson: covariance is not positive definite");
    log_det += std::log(v);
  }
  return log_det;
}

/// Real eigenvalues of the symmetric circulant whose first row is c.
inline std::vector<double> circulant_eigenvalues(const std::vector<double>& c) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, c);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = spec[i].real();
  return out;
}

}  // namespace detail

/// Autocorrelation of unit-variance fGn at lags 0..n-1.
inline std::vector<double> fgn_acf(HurstExponent h, std::size_t n) {
  if (n == 0) throw ArgumentError("fgn_acf: n must be positive");
  return detail::fgn_acf(h.value(), n);
}

/// Dense Toeplitz covariance tau^{-1} Sigma_H (diagnostics and oracles).
inline Eigen::MatrixXd toeplitz_covariance(HurstExponent h, std::size_t n, double tau = 1.0) {
  const auto r = fgn_acf(h, n);
  Eigen::MatrixXd s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = r[i > j ? i - j : j - i] / tau;
  return s;
}

enum class SimulationPath { CirculantEmbedding, DenseCholesky };

struct FgnSample {
  std::vector<double> values;
  SimulationPath path = SimulationPath::CirculantEmbedding;
};

namespace detail {

/// Exact zero-mean unit-variance fGn draw. Circulant (Davies-Harte)
/// embedding of size 2g with g the next power of two >= n-1; falls back to a
/// dense Cholesky factor if the embedding has a negative eigenvalue.
inline FgnSample simulate_fgn(double h, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FgnSample out;
  if (n == 1) {
    out.values = {normal(rng)};
    return out;
  }
  std::size_t g = 1;
  while (g < n - 1) g <<= 1;
  const std::size_t big = 2 * g;
  std::vector<double> c(big);
  for (std::size_t j = 0; j <= g; ++j) c[j] = fgn_acf_at(h, j);
  for (std::size_t j = g + 1; j < big; ++j) c[j] = c[big - j];
  const auto lambda = circulant_eigenvalues(c);
  bool ok = true;
  for (double l : lambda)
    if (l < -1e-10) ok = false;
  if (ok) {
    std::vector<std::complex<double>> z(big);
    for (std::size_t k = 0; k < big; ++k) {
      const double s = std::sqrt(std::max(lambda[k], 0.0) / static_cast<double>(big));
      const double a = normal(rng);
      const double b = normal(rng);
      z[k] = {s * a, s * b};
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> y;
    fft.fwd(y, z);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = y[i].real();
    out.path = SimulationPath::CirculantEmbedding;
    return out;
  }
  const auto r = fgn_acf(h, n);
  Eigen::MatrixXd s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = r[i > j ? i - j : j - i];
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("simulate_fgn: Toeplitz covariance is not positive definite");
  Eigen::VectorXd e(n);
  for (std::size_t i = 0; i < n; ++i) e(i) = normal(rng);
  const Eigen::VectorXd x = llt.matrixL() * e;
  out.values.assign(x.data(), x.data() + n);
  out.path = SimulationPath::DenseCholesky;
  return out;
}

}  // namespace detail

/// Exact fGn sample of length n; deterministic given the seed.
inline FgnSample simulate_fgn(HurstExponent h, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("simulate_fgn: n must be at least 2");
  std::mt19937_64 rng(seed);
  return detail::simulate_fgn(h.value(), n, rng);
}

/// Exact Gaussian log-density of x under covariance tau^{-1} Sigma_H.
inline double fgn_logdensity(std::span<const double> x, HurstExponent h, double tau) {
  if (x.empty()) throw ArgumentError("fgn_logdensity: empty input");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("fgn_logdensity: tau must be positive");
  for (double v : x)
    if (!std::isfinite(v)) throw ArgumentError("fgn_logdensity: non-finite input");
  const std::size_t n = x.size();
  const auto r = detail::fgn_acf(h.value(), n);
  std::vector<double> work;
  const auto lv = detail::levinson(r, x, work);
  const double nd = static_cast<double>(n);
  return -0.5 * nd * std::log(2.0 * std::numbers::pi) - 0.5 * (lv.log_det - nd * std::log(tau)) - 0.5 * tau * lv.quad_form;
}

/// KLD(p || q) between two stationary Gaussian processes given by their
/// covariance first rows, using the eigenvalues of the circulant obtained by
/// folding each row onto a circle of the series length.
inline double stationary_kld(std::span<const double> first_row_p, std::span<const double> first_row_q) {
  const std::size_t n = first_row_p.size();
  if (n == 0 || first_row_q.size() != n) throw ArgumentError("stationary_kld: rows must be nonempty and of equal length");
  auto fold = [n](std::span<const double> r) {
    std::vector<double> c(n);
    c[0] = r[0];
    for (std::size_t j = 1; j < n; ++j) c[j] = r[std::min(j, n - j)];
    return c;
  };
  const auto lp = detail::circulant_eigenvalues(fold(first_row_p));
  const auto lq = detail::circulant_eigenvalues(fold(first_row_q));
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(lq[j] > 0.0)) throw NumericalError("stationary_kld: approximating covariance has a non-positive eigenvalue");
    if (!(lp[j] > 0.0)) throw NumericalError("stationary_kld: target covariance has a non-positive eigenvalue");
    const double ratio = lp[j] / lq[j];
    acc += std::log(ratio) - ratio + 1.0;
  }
  return -0.5 * acc;
}

}  // namespace tvfgn
