#pragma once

// Log prior densities: penalised-complexity priors for a precision and for
// the Hurst exponent of fGn, and the Laplace prior for beta.

#include <cmath>
#include <numbers>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/fgn.hpp"

namespace tvfgn {

/// Rate of the exponential prior on sigma = tau^{-1/2} with P(sigma > u) = alpha.
inline double pc_precision_rate(double u, double alpha) {
  if (!(u > 0.0)) throw ArgumentError("pc_prior_precision: u must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("pc_prior_precision: alpha must lie in (0,1)");
  return -std::log(alpha) / u;
}

/// log[(lambda/2) tau^{-3/2} exp(-lambda tau^{-1/2})].
inline double pc_prior_precision(double tau, double u, double alpha) {
  const double lambda = pc_precision_rate(u, alpha);
  if (!(tau > 0.0)) throw ArgumentError("pc_prior_precision: tau must be positive");
  return std::log(0.5 * lambda) - 1.5 * std::log(tau) - lambda / std::sqrt(tau);
}

/// Laplace log-density with the given scale.
inline double laplace_prior_beta(double beta, double scale = 1.0) {
  if (!(scale > 0.0)) throw ArgumentError("laplace_prior_beta: scale must be positive");
  return -std::log(2.0 * scale) - std::abs(beta) / scale;
}

/// Distance of fGn(H) from white noise at length n_ref:
/// sqrt(2 KLD) = sqrt(-log|Sigma_H|), since tr(Sigma_H) = n_ref.
inline double hurst_distance(double h, int n_ref) {
  if (n_ref < 2) throw ArgumentError("hurst_distance: n_ref must be at least 2");
  if (h <= 0.5) return 0.0;
  const auto r = detail::fgn_acf(h, static_cast<std::size_t>(n_ref));
  const double kld2 = -detail::levinson_log_det(r);
  return std::sqrt(std::max(kld2, 0.0));
}

/// d'(H) by finite differences (forward near the base model).
inline double hurst_distance_slope(double h, int n_ref) {
  const double step = 1e-4;
  if (h - step <= 0.5) {
    const double a = std::max(h, 0.5);
    return (hurst_distance(a + step, n_ref) - hurst_distance(a, n_ref)) / step;
  }
  return (hurst_distance(h + step, n_ref) - hurst_distance(h - step, n_ref)) / (2.0 * step);
}

/// Rate so that P(H > h_upper) = prob under the exponential on d.
inline double pc_hurst_rate(double h_upper = 0.9, double prob = 0.1, int n_ref = 100) {
  if (!(prob > 0.0 && prob < 1.0)) throw ArgumentError("pc_hurst_rate: prob must lie in (0,1)");
  return -std::log(prob) / hurst_distance(h_upper, n_ref);
}

/// log[lambda exp(-lambda d(H)) |d'(H)|] with base model H = 0.5.
inline double pc_prior_hurst(HurstExponent h, double lambda, int n_ref = 100) {
  if (!(lambda > 0.0)) throw ArgumentError("pc_prior_hurst: lambda must be positive");
  const double d = hurst_distance(h.value(), n_ref);
  const double slope = hurst_distance_slope(h.value(), n_ref);
  return std::log(lambda) - lambda * d + std::log(std::abs(slope));
}

}  // namespace tvfgn
