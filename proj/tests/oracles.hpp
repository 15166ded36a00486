#pragma once

// Independent reference implementations used only by the tests. Everything
// here is dense and brute force: covariance matrices are built from their
// generative definitions rather than from the library's sparse precisions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "tvfgn/lgm.hpp"

namespace oracle {

inline double fgn_rho(double h, long k) {
  k = std::labs(k);
  if (k == 0) return 1.0;
  auto p = [h](double x) { return std::pow(x, 2.0 * h); };
  return 0.5 * (p(k + 1.0) - 2.0 * p(static_cast<double>(k)) + p(k - 1.0));
}

inline Eigen::MatrixXd fgn_covariance(double h, int n, double tau = 1.0) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = fgn_rho(h, i - j) / tau;
  return s;
}

inline Eigen::MatrixXd ar1_covariance(double phi, int n) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = std::pow(phi, std::abs(i - j));
  return s;
}

/// log N(x; 0, S) by dense Cholesky.
inline double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw std::runtime_error("oracle: covariance not positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(x);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * z.squaredNorm();
}

/// Mann-Whitney U / (n_pos n_neg) over all pairs, ties counted one half.
inline double mann_whitney_auc(std::span<const double> s, const std::vector<bool>& y) {
  double num = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      ++pairs;
      if (s[i] > s[j]) num += 1.0;
      else if (s[i] == s[j]) num += 0.5;
    }
  }
  return num / static_cast<double>(pairs);
}

inline double kendall_brute(std::span<const double> x) {
  const std::size_t p = x.size();
  long c = 0, d = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (x[j] > x[i]) ++c;
      else if (x[j] < x[i]) ++d;
    }
  return static_cast<double>(c - d) / (0.5 * static_cast<double>(p) * static_cast<double>(p - 1));
}

inline double sample_acf(std::span<const double> x, std::size_t lag) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double c0 = 0.0, ck = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c0 += (x[i] - mean) * (x[i] - mean);
  for (std::size_t i = lag; i < x.size(); ++i) ck += (x[i] - mean) * (x[i - lag] - mean);
  return ck / c0;
}

/// Lag-k autocorrelation of a series with known zero mean (no centering).
inline double sample_acf_zero_mean(std::span<const double> x, std::size_t lag) {
  double c0 = 0.0, ck = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c0 += x[i] * x[i];
  for (std::size_t i = lag; i < x.size(); ++i) ck += x[i] * x[i - lag];
  return ck / c0;
}

/// Least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Moore-Penrose inverse of a symmetric matrix by eigen-decomposition.
inline Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double rel_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = std::abs(inv(i)) > rel_tol * top ? 1.0 / inv(i) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// rw2 structure matrix R = D'D on M points, built from the difference operator.
inline Eigen::MatrixXd rw2_structure(int big_m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(big_m - 2, big_m);
  for (int r = 0; r < big_m - 2; ++r) {
    d(r, r) = 1.0;
    d(r, r + 1) = -2.0;
    d(r, r + 2) = 1.0;
  }
  return d.transpose() * d;
}

/// Prior covariance of the whole latent vector, from the generative model:
/// trend ~ pseudo-inverse of the scaled rw2 precision (sum-to-zero and
/// zero-slope constraints), intercept/slope ~ N(0, 1/precision),
/// Z blocks ~ unit AR(1), eps = tau^{-1/2} (A1 Z1 + A2 Z2) + N(0, 1/tau_h).
inline Eigen::MatrixXd latent_prior_covariance(const tvfgn::LatentModel& model, const tvfgn::HyperParams& th) {
  const auto& spec = model.spec();
  const int dim = static_cast<int>(model.dimension());
  const int big_m = static_cast<int>(model.grid_size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  if (spec.trend) {
    const Eigen::MatrixXd r = rw2_structure(big_m);
    const Eigen::MatrixXd rp = symmetric_pinv(r);
    double lg = 0.0;
    for (int j = 0; j < big_m; ++j) lg += std::log(rp(j, j));
    const double g = std::exp(lg / big_m);
    cov.block(model.trend_offset(), model.trend_offset(), big_m, big_m) = rp / (*th.trend_precision * g);
  }
  if (spec.intercept) cov(model.intercept_offset(), model.intercept_offset()) = 1.0 / spec.intercept_precision;
  if (spec.slope) cov(model.slope_offset(), model.slope_offset()) = 1.0 / spec.slope_precision;
  if (spec.mixture) {
    const int m = spec.m;
    const int off = model.mixture_offset();
    const auto ms = model.mixture_spec(th);
    const auto sig = ms.sigma();
    const auto& w = model.weight().w;
    const auto c1 = model.table().lookup(th.h1);
    const auto c2 = model.table().lookup(th.h2);
    const tvfgn::CascadeCoefficients* cs[2] = {&c1, &c2};
    const int zdim = 2 * m * big_m;
    Eigen::MatrixXd tz = Eigen::MatrixXd::Zero(zdim, zdim);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(big_m, zdim);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < m; ++j) {
        const int b = (i * m + j) * big_m;
        tz.block(b, b, big_m, big_m) = ar1_covariance(cs[i]->phi[j], big_m);
        for (int t = 0; t < big_m; ++t) {
          const double d = i == 0 ? std::sqrt(1.0 - w[t]) : std::sqrt(w[t]);
          a(t, b + t) = std::sqrt(cs[i]->v[j]) * d * sig[t] / std::sqrt(th.tau);
        }
      }
    Eigen::MatrixXd u(big_m + zdim, big_m + zdim);
    u.topLeftCorner(big_m, big_m) = a * tz * a.transpose() + Eigen::MatrixXd::Identity(big_m, big_m) / tvfgn::kTauHigh;
    u.topRightCorner(big_m, zdim) = a * tz;
    u.bottomLeftCorner(zdim, big_m) = tz * a.transpose();
    u.bottomRightCorner(zdim, zdim) = tz;
    cov.block(off, off, big_m + zdim, big_m + zdim) = u;
  }
  return cov;
}

/// Observation matrix B (n x dim): linear interpolation from the grid for
/// trend and eps, ones for the intercept, the standardized time for the slope.
inline Eigen::MatrixXd design_matrix(const tvfgn::LatentModel& model) {
  const auto& spec = model.spec();
  const int n = static_cast<int>(model.observations());
  const auto& grid = model.grid();
  const int big_m = static_cast<int>(grid.size());
  Eigen::MatrixXd interp = Eigen::MatrixXd::Zero(n, big_m);
  for (int i = 0; i < n; ++i) {
    const double t = spec.timestamps[i];
    int j = 0;
    while (j + 1 < big_m && grid[j + 1] <= t) ++j;
    if (j + 1 >= big_m || t == grid[j]) {
      interp(i, j) = 1.0;
    } else {
      const double f = (t - grid[j]) / (grid[j + 1] - grid[j]);
      interp(i, j) = 1.0 - f;
      interp(i, j + 1) = f;
    }
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<int>(model.dimension()));
  if (spec.trend) b.block(0, model.trend_offset(), n, big_m) = interp;
  if (spec.intercept) b.col(model.intercept_offset()).setOnes();
  if (spec.slope) {
    double mean = 0.0, ss = 0.0;
    for (double t : spec.timestamps) mean += t;
    mean /= n;
    for (double t : spec.timestamps) ss += (t - mean) * (t - mean);
    const double sd = std::sqrt(ss / n);
    for (int i = 0; i < n; ++i) b(i, model.slope_offset()) = (spec.timestamps[i] - mean) / sd;
  }
  if (spec.mixture) b.block(0, model.mixture_offset(), n, big_m) = interp;
  return b;
}

struct DenseConditional {
  double log_marginal = 0.0;
  Eigen::VectorXd mean;
};

/// Exact Gaussian conditioning of the latent vector on y = B x + noise.
inline DenseConditional condition(const tvfgn::LatentModel& model, const tvfgn::HyperParams& th, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd sx = latent_prior_covariance(model, th);
  const Eigen::MatrixXd b = design_matrix(model);
  const Eigen::MatrixXd sy = b * sx * b.transpose() + Eigen::MatrixXd::Identity(y.size(), y.size()) / model.spec().obs_precision;
  DenseConditional out;
  out.log_marginal = gaussian_logpdf(y, sy);
  out.mean = sx * b.transpose() * sy.ldlt().solve(y);
  return out;
}

}  // namespace oracle
