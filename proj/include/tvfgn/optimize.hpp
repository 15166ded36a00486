#pragma once

// Small derivative-free optimizers shared across the library: golden-section
// search for scalar problems, Nelder-Mead with restarts for the cascade fits,
// and BFGS driven by finite-difference gradients for hyperparameter modes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "tvfgn/error.hpp"

namespace tvfgn::optimize {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimizes a unimodal f on [lo, hi] to bracket width `tol`.
template <typename F>
ScalarMinimum golden_section(F&& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw ArgumentError("golden_section: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  ScalarMinimum out;
  if (fc < fd) {
    out.x = c;
    out.value = fc;
  } else {
    out.x = d;
    out.value = fd;
  }
  out.evaluations = evals;
  return out;
}

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double initial_step = 0.5;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-9;
  int restarts = 3;
};

struct VectorMinimum {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex search. After convergence the simplex is rebuilt
/// around the best vertex up to `restarts` times; this escapes the premature
/// collapse the method is prone to on nonsmooth objectives.
template <typename F>
VectorMinimum nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t d = x0.size();
  if (d == 0) throw ArgumentError("nelder_mead: empty parameter vector");
  VectorMinimum best;
  best.x = x0;
  best.value = f(x0);
  best.evaluations = 1;

  for (int round = 0; round <= opt.restarts; ++round) {
    std::vector<std::vector<double>> simplex(d + 1, best.x);
    std::vector<double> fv(d + 1, best.value);
    for (std::size_t i = 0; i < d; ++i) {
      simplex[i + 1][i] += opt.initial_step;
      fv[i + 1] = f(simplex[i + 1]);
      ++best.evaluations;
    }
    std::vector<std::size_t> order(d + 1);
    bool local_converged = false;
    while (best.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t lo = order.front(), hi = order.back(), nh = order[d - 1];
      double spread = 0.0;
      for (std::size_t i = 0; i <= d; ++i)
        for (std::size_t k = 0; k < d; ++k)
          spread = std::max(spread, std::abs(simplex[i][k] - simplex[lo][k]));
      if (std::abs(fv[hi] - fv[lo]) <= opt.f_tolerance * (std::abs(fv[lo]) + 1e-30) &&
          spread <= opt.x_tolerance * 1e3) {
        local_converged = true;
        break;
      }
      if (spread <= opt.x_tolerance) {
        local_converged = true;
        break;
      }
      ++best.iterations;
      std::vector<double> centroid(d, 0.0);
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == hi) continue;
        for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
      }
      auto along = [&](double t) {
        std::vector<double> p(d);
        for (std::size_t k = 0; k < d; ++k) p[k] = centroid[k] + t * (simplex[hi][k] - centroid[k]);
        return p;
      };
      auto xr = along(-1.0);
      const double fr = f(xr);
      ++best.evaluations;
      if (fr < fv[lo]) {
        auto xe = along(-2.0);
        const double fe = f(xe);
        ++best.evaluations;
        if (fe < fr) {
          simplex[hi] = std::move(xe);
          fv[hi] = fe;
        } else {
          simplex[hi] = std::move(xr);
          fv[hi] = fr;
        }
        continue;
      }
      if (fr < fv[nh]) {
        simplex[hi] = std::move(xr);
        fv[hi] = fr;
        continue;
      }
      const bool outside = fr < fv[hi];
      auto xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      ++best.evaluations;
      if (fc < (outside ? fr : fv[hi])) {
        simplex[hi] = std::move(xc);
        fv[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == lo) continue;
        for (std::size_t k = 0; k < d; ++k) simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
        fv[i] = f(simplex[i]);
        ++best.evaluations;
      }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    const std::size_t arg = static_cast<std::size_t>(it - fv.begin());
    const double previous = best.value;
    if (fv[arg] <= best.value) {
      best.value = fv[arg];
      best.x = simplex[arg];
    }
    best.converged = local_converged;
    if (best.evaluations >= opt.max_evaluations) break;
    if (round > 0 && previous - best.value <= opt.f_tolerance * (std::abs(best.value) + 1e-30)) break;
  }
  return best;
}

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;
  double f_tolerance = 1e-10;
  double fd_step = 1e-4;
  double max_step = 2.0;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< objective value after each iteration
};

/// Central-difference gradient.
template <typename F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h, int& evals) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
    evals += 2;
  }
  return g;
}

/// Central-difference Hessian (1 + 2d + 2d(d-1) evaluations).
template <typename F>
Eigen::MatrixXd fd_hessian(F&& f, const Eigen::VectorXd& x, double h, double f0, int& evals) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd hess(d, d);
  Eigen::VectorXd xp = x;
  std::vector<double> fplus(d), fminus(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    xp(i) = x(i) + h;
    fplus[i] = f(xp);
    xp(i) = x(i) - h;
    fminus[i] = f(xp);
    xp(i) = x(i);
    hess(i, i) = (fplus[i] - 2.0 * f0 + fminus[i]) / (h * h);
    evals += 2;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      double acc = 0.0;
      for (int si = -1; si <= 1; si += 2) {
        for (int sj = -1; sj <= 1; sj += 2) {
          xp(i) = x(i) + si * h;
          xp(j) = x(j) + sj * h;
          acc += si * sj * f(xp);
          ++evals;
        }
      }
      xp(i) = x(i);
      xp(j) = x(j);
      hess(i, j) = hess(j, i) = acc / (4.0 * h * h);
    }
  }
  return hess;
}

/// Quasi-Newton minimization with finite-difference gradients and a
/// backtracking Armijo line search. Non-finite objective values are treated
/// as +inf so the line search backs away from them.
template <typename F>
BfgsResult bfgs_minimize(F&& f_raw, Eigen::VectorXd x0, const BfgsOptions& opt = {}) {
  auto f = [&](const Eigen::VectorXd& x) {
    const double v = f_raw(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  BfgsResult res;
  const Eigen::Index d = x0.size();
  Eigen::VectorXd x = std::move(x0);
  double fx = f(x);
  res.evaluations = 1;
  if (!std::isfinite(fx)) throw NumericalError("bfgs: objective is not finite at the starting point");
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd g = fd_gradient(f, x, opt.fd_step, res.evaluations);
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd p = -hinv * g;
    if (p.dot(g) >= 0.0) {
      hinv.setIdentity();
      p = -g;
    }
    const double pn = p.norm();
    if (pn > opt.max_step) p *= opt.max_step / pn;
    double step = 1.0;
    const double slope = p.dot(g);
    Eigen::VectorXd xn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * p;
      fn = f(xn);
      ++res.evaluations;
      if (fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease along the quasi-Newton direction: retry once along -g.
      if (hinv.isIdentity()) {
        res.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * opt.gradient_tolerance;
        break;
      }
      hinv.setIdentity();
      continue;
    }
    Eigen::VectorXd gn = fd_gradient(f, xn, opt.fd_step, res.evaluations);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    const double df = fx - fn;
    x = std::move(xn);
    g = std::move(gn);
    fx = fn;
    res.trace.push_back(fx);
    if (sy > 1e-12) {
      if (it == 0) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(d, d);
      hinv = (ident - rho * s * y.transpose()) * hinv * (ident - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (df >= 0.0 && df < opt.f_tolerance * (1.0 + std::abs(fx)) && s.lpNorm<Eigen::Infinity>() < 1e-6) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace tvfgn::optimize
