#pragma once

// Latent Gaussian model: additive predictor of a scaled, constrained rw2
// trend, optional intercept and slope, and the stacked fGn mixture, observed
// through an interpolation matrix with fixed high observation precision.
// Conditionals and marginal likelihoods are exact given the hyperparameters.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tvfgn/ar1_cascade.hpp"
#include "tvfgn/error.hpp"
#include "tvfgn/mixture.hpp"

namespace tvfgn {

/// Hyperparameters on the user scale.
struct HyperParams {
  double tau = 1.0;
  double h1 = 0.7;
  double h2 = 0.7;
  std::optional<double> beta;
  std::optional<double> trend_precision;
};

struct LatentModelSpec {
  std::vector<double> timestamps;            ///< observation times
  std::optional<InterpolationMatrix> interp;  ///< absent: latent grid = observations
  bool mixture = true;
  bool trend = false;
  bool intercept = false;
  bool slope = false;
  bool time_varying_sd = false;  ///< estimate beta
  int m = 4;
  double obs_precision = kTauHigh;
  double intercept_precision = 1e-4;
  double slope_precision = 1e-4;
  std::optional<std::vector<double>> grid_weights;  ///< tabulated w on the latent grid
  const CoefficientTable* table = nullptr;           ///< defaults to the built-in table for m
};

/// Mixture-only model on unit-spaced times.
inline LatentModelSpec mixture_only_spec(std::size_t n, int m = 4) {
  LatentModelSpec s;
  s.timestamps.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.timestamps[i] = static_cast<double>(i + 1);
  s.m = m;
  return s;
}

/// Sparse matrix whose sparsity pattern is fixed at construction; values are
/// refilled from a triplet stream emitted in the same order each time.
class FixedPatternMatrix {
 public:
  void build(int dim, const TripletSink& sink) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sink.rows.size());
    for (std::size_t k = 0; k < sink.rows.size(); ++k) trip.emplace_back(sink.rows[k], sink.cols[k], 1.0);
    matrix_.resize(dim, dim);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    pos_.resize(sink.rows.size());
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    for (std::size_t k = 0; k < sink.rows.size(); ++k) {
      const int c = sink.cols[k], r = sink.rows[k];
      const int* first = inner + outer[c];
      const int* last = inner + outer[c + 1];
      const int* it = std::lower_bound(first, last, r);
      pos_[k] = static_cast<int>(it - inner);
    }
    fill(sink.values);
  }
  void fill(const std::vector<double>& values) {
    if (values.size() != pos_.size()) throw NumericalError("FixedPatternMatrix: triplet stream changed length");
    double* v = matrix_.valuePtr();
    std::fill(v, v + matrix_.nonZeros(), 0.0);
    for (std::size_t k = 0; k < pos_.size(); ++k) v[pos_[k]] += values[k];
  }
  [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }

 private:
  Eigen::SparseMatrix<double> matrix_;  // lower triangle
  std::vector<int> pos_;
};

/// Result of conditioning the latent field on data.
/// `mean` is in the public latent layout. The remaining fields describe the
/// factorized system, whose trend block is shifted by the intercept and slope
/// terms when those are confounded with the rw2 null space.
struct GaussianConditional {
  Eigen::VectorXd mean;  ///< constrained posterior mean
  Eigen::VectorXd unconstrained_mean;
  Eigen::SparseMatrix<double> precision;  ///< lower triangle of the posterior precision
  double log_det_precision = 0.0;
  double log_det_prior = 0.0;  ///< generalized log-determinant of the prior precision
  Eigen::MatrixXd constraints;  ///< rows of C (empty when proper)
};

namespace detail {

/// Second-difference matrix D ((M-2) x M).
inline Eigen::SparseMatrix<double> second_difference(std::size_t big_m) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i + 2 < big_m; ++i) {
    const auto r = static_cast<int>(i);
    t.emplace_back(r, r, 1.0);
    t.emplace_back(r, r + 1, -2.0);
    t.emplace_back(r, r + 2, 1.0);
  }
  Eigen::SparseMatrix<double> d(static_cast<Eigen::Index>(big_m - 2), static_cast<Eigen::Index>(big_m));
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

struct Rw2Structure {
  std::size_t size = 0;
  double scale = 1.0;         ///< g: geometric mean of diag(R^+)
  double log_gdet = 0.0;      ///< log det(D D')
  Eigen::MatrixXd null_basis;  ///< M x 2 orthonormal basis of {1, j}
  std::vector<double> marginal_variance;  ///< diag(R^+)/g
};

/// Generalized inverse diagonal of R = D'D via R^+ = D'(DD')^{-2}D.
inline Rw2Structure rw2_structure(std::size_t big_m) {
  if (big_m < 4) throw ArgumentError("rw2: need at least four grid points");
  Rw2Structure s;
  s.size = big_m;
  const auto d = second_difference(big_m);
  const Eigen::SparseMatrix<double> ddt = d * d.transpose();
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(ddt);
  if (llt.info() != Eigen::Success) throw NumericalError("rw2: DD' factorization failed");
  s.log_gdet = 2.0 * Eigen::VectorXd(llt.matrixL().nestedExpression().diagonal()).array().log().sum();
  std::vector<double> diag(big_m);
  Eigen::VectorXd col(big_m - 2);
  for (std::size_t j = 0; j < big_m; ++j) {
    col.setZero();
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, static_cast<Eigen::Index>(j)); it; ++it) col(it.row()) = it.value();
    diag[j] = llt.solve(col).squaredNorm();
  }
  double lg = 0.0;
  for (double v : diag) lg += std::log(v);
  s.scale = std::exp(lg / static_cast<double>(big_m));
  s.marginal_variance.resize(big_m);
  for (std::size_t j = 0; j < big_m; ++j) s.marginal_variance[j] = diag[j] / s.scale;
  s.null_basis.resize(static_cast<Eigen::Index>(big_m), 2);
  const double md = static_cast<double>(big_m);
  double ss = 0.0;
  for (std::size_t j = 0; j < big_m; ++j) {
    const double c = static_cast<double>(j) - 0.5 * (md - 1.0);
    s.null_basis(static_cast<Eigen::Index>(j), 0) = 1.0 / std::sqrt(md);
    s.null_basis(static_cast<Eigen::Index>(j), 1) = c;
    ss += c * c;
  }
  s.null_basis.col(1) /= std::sqrt(ss);
  return s;
}

}  // namespace detail

/// Compiled latent model: fixed structure, sparsity pattern and symbolic
/// factorization, evaluated at many hyperparameter points.
class LatentModel {
 public:
  explicit LatentModel(LatentModelSpec spec) : spec_(std::move(spec)) {
    if (spec_.m != 3 && spec_.m != 4) throw ArgumentError("LatentModel: m must be 3 or 4");
    if (!spec_.mixture && !spec_.trend && !spec_.intercept) throw ArgumentError("LatentModel: no latent components");
    detail::require_increasing(spec_.timestamps, "LatentModel");
    if (!(spec_.obs_precision > 0.0)) throw ArgumentError("LatentModel: observation precision must be positive");
    table_ = spec_.table != nullptr ? spec_.table : &CoefficientTable::builtin(spec_.m);
    if (table_->m() != spec_.m) throw ArgumentError("LatentModel: table cascade size differs from m");
    n_ = spec_.timestamps.size();
    if (spec_.interp) {
      if (spec_.interp->rows() != n_) throw ArgumentError("LatentModel: interpolation matrix rows differ from series length");
      grid_ = spec_.interp->grid;
    } else {
      grid_ = spec_.timestamps;
    }
    big_m_ = grid_.size();
    if (spec_.grid_weights) {
      weight_ = tabulated_weight(grid_, *spec_.grid_weights);
    } else {
      weight_ = linear_weight(grid_);
    }
    // latent layout
    std::size_t off = 0;
    if (spec_.trend) {
      trend_off_ = static_cast<int>(off);
      off += big_m_;
      rw2_ = detail::rw2_structure(big_m_);
    }
    if (spec_.intercept) intercept_off_ = static_cast<int>(off++);
    if (spec_.slope) slope_off_ = static_cast<int>(off++);
    if (spec_.mixture) {
      mix_off_ = static_cast<int>(off);
      off += big_m_ * (1 + 2 * static_cast<std::size_t>(spec_.m));
    }
    dim_ = off;
    // slope covariate: standardized observation time
    slope_cov_.assign(n_, 0.0);
    if (spec_.slope) {
      double mean = 0.0, ss = 0.0;
      for (double t : spec_.timestamps) mean += t;
      mean /= static_cast<double>(n_);
      for (double t : spec_.timestamps) ss += (t - mean) * (t - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n_));
      for (std::size_t i = 0; i < n_; ++i) slope_cov_[i] = (spec_.timestamps[i] - mean) / sd;
      grid_slope_.resize(big_m_);
      for (std::size_t j = 0; j < big_m_; ++j) grid_slope_[j] = (grid_[j] - mean) / sd;
    }
    // The intercept (and a slope linear in the grid index) lies in the rw2 null
    // space. Factorizing in those coordinates leaves an O(intercept precision)
    // pivot after cancelling O(n obs_precision) terms, which fails for smooth
    // trends. The system is therefore solved for trend' = trend + a 1 + b g,
    // a unit-Jacobian change that leaves the rw2 form and all densities intact.
    shift_intercept_ = spec_.trend && spec_.intercept;
    if (spec_.trend && spec_.slope) {
      double curv = 0.0, size = 0.0;
      for (std::size_t j = 0; j < big_m_; ++j) size = std::max(size, std::abs(grid_slope_[j]));
      for (std::size_t j = 1; j + 1 < big_m_; ++j)
        curv = std::max(curv, std::abs(grid_slope_[j + 1] - 2.0 * grid_slope_[j] + grid_slope_[j - 1]));
      shift_slope_ = curv <= 1e-9 * std::max(size, 1.0);
    }
    build_observation_rows();
    build_data_triplets();
    if (spec_.trend) {
      constraints_ = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(dim_));
      constraints_.block(0, trend_off_, 2, static_cast<Eigen::Index>(big_m_)) = rw2_.null_basis.transpose();
      sys_constraints_ = constraints_;
      const auto& nb = rw2_.null_basis;
      if (shift_intercept_) sys_constraints_.col(intercept_off_) = -nb.colwise().sum().transpose();
      if (shift_slope_) {
        const Eigen::Map<const Eigen::VectorXd> g(grid_slope_.data(), static_cast<Eigen::Index>(big_m_));
        sys_constraints_.col(slope_off_) = -(nb.transpose() * g);
      }
    }
    // symbolic analysis on a representative point
    HyperParams probe;
    if (spec_.time_varying_sd) probe.beta = 0.0;
    if (spec_.trend) probe.trend_precision = 1.0;
    TripletSink sink;
    emit_posterior_precision(sink, probe);
    pattern_.build(static_cast<int>(dim_), sink);
  }

  [[nodiscard]] const LatentModelSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] std::size_t observations() const noexcept { return n_; }
  [[nodiscard]] std::size_t grid_size() const noexcept { return big_m_; }
  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  [[nodiscard]] const WeightFunction& weight() const noexcept { return weight_; }
  [[nodiscard]] int trend_offset() const noexcept { return trend_off_; }
  [[nodiscard]] int intercept_offset() const noexcept { return intercept_off_; }
  [[nodiscard]] int slope_offset() const noexcept { return slope_off_; }
  [[nodiscard]] int mixture_offset() const noexcept { return mix_off_; }
  [[nodiscard]] const detail::Rw2Structure& rw2() const noexcept { return rw2_; }
  [[nodiscard]] const CoefficientTable& table() const noexcept { return *table_; }
  [[nodiscard]] const Eigen::MatrixXd& constraints() const noexcept { return constraints_; }
  [[nodiscard]] const std::vector<double>& slope_covariate() const noexcept { return slope_cov_; }

  /// Mixture spec on the latent grid for the given hyperparameters.
  [[nodiscard]] MixtureSpec mixture_spec(const HyperParams& th) const {
    MixtureSpec s{HurstExponent(th.h1), HurstExponent(th.h2), th.tau, weight_, std::nullopt, spec_.m};
    if (spec_.time_varying_sd) s.beta = th.beta.value_or(0.0);
    return s;
  }

  void check(const HyperParams& th) const {
    if (spec_.mixture) {
      (void)HurstExponent(th.h1);
      (void)HurstExponent(th.h2);
      if (!(th.tau > 0.0) || !std::isfinite(th.tau)) throw ArgumentError("LatentModel: tau must be positive");
    }
    if (spec_.trend && !(th.trend_precision.value_or(-1.0) > 0.0)) throw ArgumentError("LatentModel: trend precision required");
    if (spec_.time_varying_sd && !std::isfinite(th.beta.value_or(NAN))) throw ArgumentError("LatentModel: beta required");
  }

  /// Lower triangle of the prior precision Q(theta) (singular when a trend is
  /// present) and its generalized log-determinant.
  void emit_prior_precision(TripletSink& sink, const HyperParams& th, double* log_det = nullptr) const {
    double ld = 0.0;
    if (spec_.trend) {
      const double k = th.trend_precision.value_or(1.0) * rw2_.scale;
      const auto mm = static_cast<int>(big_m_);
      // R = D'D for second differences: pentadiagonal with the usual edge rows
      for (int i = 0; i < mm; ++i) {
        for (int d = 0; d <= 2 && i + d < mm; ++d) {
          double v = 0.0;
          // sum over rows r of D: D(r,i) D(r,i+d), D(r, r..r+2) = (1,-2,1)
          for (int r = std::max(0, i + d - 2); r <= std::min(i, mm - 3); ++r) {
            const double coef[3] = {1.0, -2.0, 1.0};
            v += coef[i - r] * coef[i + d - r];
          }
          sink.add(trend_off_ + i + d, trend_off_ + i, k * v);
        }
      }
      ld += static_cast<double>(big_m_ - 2) * std::log(k) + rw2_.log_gdet;
    }
    if (spec_.intercept) {
      sink.add(intercept_off_, intercept_off_, spec_.intercept_precision);
      ld += std::log(spec_.intercept_precision);
    }
    if (spec_.slope) {
      sink.add(slope_off_, slope_off_, spec_.slope_precision);
      ld += std::log(spec_.slope_precision);
    }
    if (spec_.mixture) {
      const auto ms = mixture_spec(th);
      const auto c1 = table_->lookup(ms.h1);
      const auto c2 = table_->lookup(ms.h2);
      detail::emit_stacked_precision(sink, mix_off_, ms, c1, c2);
      ld += detail::stacked_log_det(big_m_, c1, c2);
    }
    if (log_det) *log_det = ld;
  }

  /// Lower triangle of S = Q(theta) + tau_o B'B.
  void emit_posterior_precision(TripletSink& sink, const HyperParams& th, double* prior_log_det = nullptr) const {
    emit_prior_precision(sink, th, prior_log_det);
    for (std::size_t k = 0; k < data_vals_.size(); ++k) sink.add(data_rows_[k], data_cols_[k], data_vals_[k]);
  }

  /// B'y scaled by the observation precision.
  [[nodiscard]] Eigen::VectorXd data_rhs(std::span<const double> y) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < n_; ++i)
      for (const auto& [col, val] : sys_rows_[i]) b(col) += spec_.obs_precision * val * y[i];
    return b;
  }

  /// Linear predictor B x at the observation times.
  [[nodiscard]] Eigen::VectorXd predictor(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (const auto& [col, val] : obs_rows_[i]) acc += val * x(col);
      out(static_cast<Eigen::Index>(i)) = acc;
    }
    return out;
  }

  /// Grid-to-observation map applied to one grid-sized block of x at `off`.
  [[nodiscard]] Eigen::VectorXd map_block(const Eigen::VectorXd& x, int off) const {
    Eigen::VectorXd g = x.segment(off, static_cast<Eigen::Index>(big_m_));
    if (spec_.interp) return spec_.interp->a * g;
    return g;
  }

  [[nodiscard]] const std::vector<std::vector<std::pair<int, double>>>& observation_rows() const noexcept { return obs_rows_; }

  /// Maps latent vectors (columns) from the factorized system to the public layout.
  void to_public(Eigen::Ref<Eigen::MatrixXd> x) const {
    if (!shift_intercept_ && !shift_slope_) return;
    const auto m = static_cast<Eigen::Index>(big_m_);
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      if (shift_intercept_) x.col(k).segment(trend_off_, m).array() -= x(intercept_off_, k);
      if (shift_slope_)
        for (Eigen::Index j = 0; j < m; ++j) x(trend_off_ + j, k) -= x(slope_off_, k) * grid_slope_[static_cast<std::size_t>(j)];
    }
  }

  /// Per-thread numeric state: the pattern copy and symbolic factorization.
  class Workspace {
   public:
    explicit Workspace(const LatentModel& model) : model_(&model), pattern_(model.pattern_) {
      solver_.analyzePattern(pattern_.matrix());
      if (solver_.info() != Eigen::Success) throw NumericalError("LatentModel: symbolic analysis failed");
    }
    /// Numeric factorization of S(theta); returns the prior log-determinant.
    double factorize(const HyperParams& th) {
      sink_.clear();
      sink_.record_positions = false;
      double ld = 0.0;
      model_->emit_posterior_precision(sink_, th, &ld);
      pattern_.fill(sink_.values);
      solver_.factorize(pattern_.matrix());
      if (solver_.info() != Eigen::Success) throw NumericalError("LatentModel: posterior precision is not positive definite");
      return ld;
    }
    [[nodiscard]] double log_det() const {
      return 2.0 * Eigen::VectorXd(solver_.matrixL().nestedExpression().diagonal()).array().log().sum();
    }
    [[nodiscard]] const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>& solver() const noexcept {
      return solver_;
    }
    [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const noexcept { return pattern_.matrix(); }

   private:
    const LatentModel* model_;
    FixedPatternMatrix pattern_;
    TripletSink sink_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
  };

  /// Evaluation of the conditional and the log marginal likelihood.
  struct Evaluation {
    double log_marginal = 0.0;
    GaussianConditional conditional;
  };

  Evaluation evaluate(Workspace& ws, const HyperParams& th, std::span<const double> y, bool keep_conditional) const {
    check(th);
    if (y.size() != n_) throw ArgumentError("LatentModel: data length differs from the model");
    const double prior_ld = ws.factorize(th);
    const double log_det_s = ws.log_det();
    const Eigen::VectorXd b = data_rhs(y);
    const Eigen::VectorXd mu = ws.solver().solve(b);
    const double nd = static_cast<double>(n_);
    double yy = 0.0;
    for (double v : y) yy += v * v;
    const double two_pi = 2.0 * std::numbers::pi;
    double lml = -0.5 * nd * std::log(two_pi) + 0.5 * prior_ld - 0.5 * log_det_s + 0.5 * nd * std::log(spec_.obs_precision) -
                 0.5 * spec_.obs_precision * yy + 0.5 * b.dot(mu);
    Evaluation out;
    Eigen::VectorXd mean = mu;
    if (spec_.trend) {
      const Eigen::MatrixXd ct = sys_constraints_.transpose();
      const Eigen::MatrixXd v = ws.solver().solve(ct);
      const Eigen::Matrix2d w = sys_constraints_ * v;
      const Eigen::Vector2d cm = sys_constraints_ * mu;
      Eigen::LLT<Eigen::Matrix2d> wl(w);
      if (wl.info() != Eigen::Success) throw NumericalError("LatentModel: constraint covariance is singular");
      const Eigen::Vector2d sol = wl.solve(cm);
      const double ldw = 2.0 * std::log(wl.matrixL()(0, 0) * wl.matrixL()(1, 1));
      // log density of Cx at 0 under the unconstrained posterior; its
      // -log(2 pi) cancels the null-space part of the intrinsic prior constant
      lml += -0.5 * ldw - 0.5 * cm.dot(sol);
      mean = mu - v * sol;
    }
    out.log_marginal = lml;
    if (keep_conditional) {
      to_public(mean);
      out.conditional.mean = std::move(mean);
      out.conditional.unconstrained_mean = mu;
      out.conditional.precision = ws.matrix();
      out.conditional.log_det_precision = log_det_s;
      out.conditional.log_det_prior = prior_ld;
      out.conditional.constraints = sys_constraints_;
    }
    return out;
  }

  /// K draws from the constrained conditional, one per column.
  [[nodiscard]] Eigen::MatrixXd sample_conditional(Workspace& ws, const HyperParams& th, std::span<const double> y, int draws,
                                                   std::uint64_t seed) const {
    const auto ev = evaluate(ws, th, y, true);
    const auto& solver = ws.solver();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto d = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd out(d, draws);
    Eigen::MatrixXd v;
    Eigen::MatrixXd wi;
    if (spec_.trend) {
      v = solver.solve(Eigen::MatrixXd(sys_constraints_.transpose()));
      wi = (sys_constraints_ * v).inverse();
    }
    for (int k = 0; k < draws; ++k) {
      Eigen::VectorXd z(d);
      for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
      // S = P' L L' P, x = mu + P' L^{-T} z
      Eigen::VectorXd u = solver.matrixU().solve(z);
      Eigen::VectorXd x = solver.permutationPinv() * u;
      x += ev.conditional.unconstrained_mean;
      if (spec_.trend) x -= v * (wi * (sys_constraints_ * x));
      out.col(k) = x;
    }
    to_public(out);
    return out;
  }

 private:
  void build_observation_rows() {
    obs_rows_.assign(n_, {});
    for (std::size_t i = 0; i < n_; ++i) {
      std::vector<std::pair<int, double>> grid_part;
      if (spec_.interp) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(spec_.interp->a, static_cast<Eigen::Index>(i)); it; ++it)
          grid_part.emplace_back(static_cast<int>(it.col()), it.value());
      } else {
        grid_part.emplace_back(static_cast<int>(i), 1.0);
      }
      auto& row = obs_rows_[i];
      if (spec_.trend)
        for (const auto& [j, a] : grid_part) row.emplace_back(trend_off_ + j, a);
      if (spec_.intercept) row.emplace_back(intercept_off_, 1.0);
      if (spec_.slope) row.emplace_back(slope_off_, slope_cov_[i]);
      if (spec_.mixture)
        for (const auto& [j, a] : grid_part) row.emplace_back(mix_off_ + j, a);
    }
    // rows of B in the shifted coordinates: the intercept and slope keep only
    // what the interpolated trend shift does not reproduce (zero up to rounding)
    sys_rows_ = obs_rows_;
    if (!shift_intercept_ && !shift_slope_) return;
    for (auto& row : sys_rows_) {
      double ones = 0.0, lin = 0.0;
      for (const auto& [col, val] : row)
        if (col >= trend_off_ && col < trend_off_ + static_cast<int>(big_m_)) {
          ones += val;
          if (shift_slope_) lin += val * grid_slope_[static_cast<std::size_t>(col - trend_off_)];
        }
      for (auto& [col, val] : row) {
        if (shift_intercept_ && col == intercept_off_) val -= ones;
        if (shift_slope_ && col == slope_off_) val -= lin;
      }
    }
  }

  // tau_o B'B, lower triangle, duplicates summed by the pattern
  void build_data_triplets() {
    for (const auto& row : sys_rows_) {
      for (std::size_t a = 0; a < row.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          int r = row[a].first, c = row[b].first;
          if (r < c) std::swap(r, c);
          data_rows_.push_back(r);
          data_cols_.push_back(c);
          data_vals_.push_back(spec_.obs_precision * row[a].second * row[b].second);
        }
      }
    }
  }

  LatentModelSpec spec_;
  const CoefficientTable* table_ = nullptr;
  std::size_t n_ = 0;
  std::size_t big_m_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> grid_;
  WeightFunction weight_;
  int trend_off_ = -1, intercept_off_ = -1, slope_off_ = -1, mix_off_ = -1;
  detail::Rw2Structure rw2_;
  std::vector<double> slope_cov_;
  std::vector<std::vector<std::pair<int, double>>> obs_rows_;
  std::vector<std::vector<std::pair<int, double>>> sys_rows_;  ///< B in the factorized coordinates
  bool shift_intercept_ = false, shift_slope_ = false;
  std::vector<double> grid_slope_;  ///< slope covariate on the latent grid
  std::vector<int> data_rows_, data_cols_;
  std::vector<double> data_vals_;
  Eigen::MatrixXd constraints_;
  Eigen::MatrixXd sys_constraints_;
  FixedPatternMatrix pattern_;
};

/// Hands out workspaces to concurrent evaluators.
class WorkspacePool {
 public:
  explicit WorkspacePool(const LatentModel& model) : model_(&model) {}
  class Lease {
   public:
    Lease(WorkspacePool* p, std::unique_ptr<LatentModel::Workspace> w) : pool_(p), ws_(std::move(w)) {}
    Lease(Lease&&) = default;
    ~Lease() {
      if (ws_) pool_->release(std::move(ws_));
    }
    LatentModel::Workspace& operator*() { return *ws_; }
    LatentModel::Workspace* operator->() { return ws_.get(); }

   private:
    WorkspacePool* pool_;
    std::unique_ptr<LatentModel::Workspace> ws_;
  };
  Lease acquire() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!free_.empty()) {
        auto w = std::move(free_.back());
        free_.pop_back();
        return Lease(this, std::move(w));
      }
    }
    return Lease(this, std::make_unique<LatentModel::Workspace>(*model_));
  }

 private:
  void release(std::unique_ptr<LatentModel::Workspace> w) {
    std::lock_guard<std::mutex> lock(mutex_);
    free_.push_back(std::move(w));
  }
  const LatentModel* model_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<LatentModel::Workspace>> free_;
};

/// One-shot joint precision assembly (full symmetric storage).
struct JointPrecision {
  Eigen::SparseMatrix<double> matrix;
  Eigen::MatrixXd constraints;
  double log_det = 0.0;  ///< generalized log-determinant
};

inline JointPrecision assemble_joint_precision(const LatentModel& model, const HyperParams& th) {
  model.check(th);
  TripletSink sink;
  JointPrecision out;
  model.emit_prior_precision(sink, th, &out.log_det);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < sink.values.size(); ++k) {
    trip.emplace_back(sink.rows[k], sink.cols[k], sink.values[k]);
    if (sink.rows[k] != sink.cols[k]) trip.emplace_back(sink.cols[k], sink.rows[k], sink.values[k]);
  }
  const auto d = static_cast<Eigen::Index>(model.dimension());
  out.matrix.resize(d, d);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.constraints = model.constraints();
  return out;
}

inline GaussianConditional condition_on_data(const LatentModel& model, const HyperParams& th, std::span<const double> y) {
  LatentModel::Workspace ws(model);
  return model.evaluate(ws, th, y, true).conditional;
}

inline double log_marginal_likelihood(const LatentModel& model, const HyperParams& th, std::span<const double> y) {
  LatentModel::Workspace ws(model);
  return model.evaluate(ws, th, y, false).log_marginal;
}

}  // namespace tvfgn
