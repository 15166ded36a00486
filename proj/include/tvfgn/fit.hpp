#pragma once

// End-to-end analysis of one observed series: standardize, build the latent
// model, explore the hyperparameter posterior and summarize it on the
// original scale.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvfgn/config.hpp"
#include "tvfgn/error.hpp"
#include "tvfgn/inference.hpp"
#include "tvfgn/lgm.hpp"
#include "tvfgn/mixture.hpp"
#include "tvfgn/series.hpp"
#include "tvfgn/stats.hpp"

namespace tvfgn {

struct Band {
  std::vector<double> mean;
  std::vector<double> lo;  ///< 2.5%
  std::vector<double> hi;  ///< 97.5%
};

struct FitReport {
  std::size_t n = 0;
  Standardization standardization;
  std::vector<double> times;
  bool regular = true;
  double grid_step = 1.0;
  std::size_t grid_size = 0;
  HyperPosterior posterior;
  std::vector<MarginalSummary> marginals;  ///< on the standardized data scale
  IncreaseProbability increase;
  std::vector<double> weight;       ///< mixture weight at each observation time
  std::vector<double> hurst_curve;  ///< weight mapped to an equivalent fGn Hurst exponent
  std::optional<Band> trend;        ///< original scale (trend + intercept + slope)
  std::vector<double> fitted;       ///< posterior-mean predictor, original scale
  std::vector<double> mixture;      ///< posterior-mean mixture component, original units
  double reconstruction_rms = 0.0;  ///< RMS(fitted - input), original units
  std::vector<std::string> warnings;
};

namespace detail {

inline bool equally_spaced(std::span<const double> t) {
  if (t.size() < 3) return true;
  const double step = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step))) return false;
  return true;
}

/// Grid step for irregular times: the smallest observation gap, widened so
/// the grid has at most 4n nodes.
inline double default_grid_step(std::span<const double> t) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) gap = std::min(gap, t[i] - t[i - 1]);
  const double span = std::ceil(t.back()) - std::floor(t.front());
  const double floor_step = span / (4.0 * static_cast<double>(t.size()) - 1.0);
  return std::max(gap, floor_step);
}

}  // namespace detail

inline LatentModelSpec fit_model_spec(const SeriesData& s, const FitOptions& opt, std::vector<std::string>* warnings = nullptr) {
  LatentModelSpec spec;
  spec.timestamps = s.timestamps;
  spec.mixture = true;
  spec.trend = opt.trend;
  spec.intercept = opt.intercept;
  spec.slope = opt.slope;
  spec.time_varying_sd = opt.time_varying_sd;
  spec.m = opt.m;
  const bool regular = detail::equally_spaced(s.timestamps);
  if (!regular || opt.grid_step) {
    const double step = opt.grid_step.value_or(detail::default_grid_step(s.timestamps));
    spec.interp = interpolation_matrix(s.timestamps, step);
    if (warnings)
      for (const auto& w : spec.interp->warnings) warnings->push_back(w);
  }
  return spec;
}

/// Fits the model to `raw` (standardized internally) and summarizes the posterior.
inline FitReport fit_series(const SeriesData& raw, const FitOptions& opt, unsigned threads = 1) {
  raw.validate();
  FitReport rep;
  rep.n = raw.size();
  if (rep.n < 50) throw ArgumentError("fit: at least 50 observations required");
  if (rep.n < 200)
    rep.warnings.push_back("series shorter than 200: Hurst estimates from simulation studies are noticeably biased at this length");
  const SeriesData s = raw.standardized();
  rep.standardization = s.standardization;
  rep.times = s.timestamps;

  const LatentModel model(fit_model_spec(s, opt, &rep.warnings));
  rep.regular = !model.spec().interp.has_value();
  rep.grid_step = model.spec().interp ? model.spec().interp->step : (rep.n > 1 ? s.timestamps[1] - s.timestamps[0] : 1.0);
  rep.grid_size = model.grid_size();

  auto exploration = opt.exploration;
  exploration.threads = threads;
  exploration.keep_conditionals = true;
  rep.posterior = explore_posterior(model, s.values, opt.priors, exploration);
  for (const auto& w : rep.posterior.warnings) rep.warnings.push_back(w);
  rep.marginals = marginal_summaries(rep.posterior, opt.curve_points);
  rep.increase = prob_increase(rep.posterior, opt.probability_draws, derive_seed(opt.seed, 1), threads);
  for (const auto& w : rep.increase.warnings) rep.warnings.push_back(w);

  // posterior-mean latent field: weighted average of the per-point conditional means
  Eigen::VectorXd latent = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dimension()));
  for (const auto& p : rep.posterior.points)
    if (p.weight > 0.0 && p.latent_mean) latent += p.weight * *p.latent_mean;
  const Eigen::VectorXd pred = model.predictor(latent);
  const Eigen::VectorXd mix = model.map_block(latent, model.mixture_offset());
  rep.fitted.resize(rep.n);
  rep.mixture.resize(rep.n);
  double ss = 0.0;
  for (std::size_t i = 0; i < rep.n; ++i) {
    rep.fitted[i] = s.destandardize(pred(static_cast<Eigen::Index>(i)));
    rep.mixture[i] = s.destandardize_scale(mix(static_cast<Eigen::Index>(i)));
    ss += (rep.fitted[i] - raw.values[i]) * (rep.fitted[i] - raw.values[i]);
  }
  rep.reconstruction_rms = std::sqrt(ss / static_cast<double>(rep.n));

  // mixture weight at observation times and its KLD-equivalent Hurst exponent
  const auto& wg = model.weight().w;
  if (model.spec().interp) {
    const Eigen::Map<const Eigen::VectorXd> wv(wg.data(), static_cast<Eigen::Index>(wg.size()));
    const Eigen::VectorXd wo = model.spec().interp->a * wv;
    rep.weight.assign(wo.data(), wo.data() + wo.size());
  } else {
    rep.weight = wg;
  }
  {
    const auto [h1, h2] = posterior_mean_hurst(rep.posterior);
    const int knots = 26;
    std::vector<double> kw(knots);
    for (int k = 0; k < knots; ++k) kw[k] = static_cast<double>(k) / (knots - 1);
    const auto kh = kld_map_curve(kw, HurstExponent(h1), HurstExponent(h2), rep.n);
    rep.hurst_curve.resize(rep.n);
    for (std::size_t i = 0; i < rep.n; ++i) {
      const double pos = std::clamp(rep.weight[i], 0.0, 1.0) * (knots - 1);
      const int lo = std::min(static_cast<int>(std::floor(pos)), knots - 2);
      const double t = pos - lo;
      rep.hurst_curve[i] = (1.0 - t) * kh[lo] + t * kh[lo + 1];
    }
  }

  // trend band by joint sampling of hyperparameters and latent field
  if (opt.trend || opt.intercept || opt.slope) {
    const int draws = std::max(opt.trend_draws, 20);
    std::vector<Eigen::VectorXd> thetas;
    detail::sample_points(rep.posterior, static_cast<std::size_t>(draws), derive_seed(opt.seed, 2),
                          [&](const Eigen::VectorXd& x) { thetas.push_back(x); });
    Eigen::MatrixXd curves(static_cast<Eigen::Index>(rep.n), draws);
    std::vector<int> ok(static_cast<std::size_t>(draws), 0);
    WorkspacePool pool(model);
    parallel_for(static_cast<std::size_t>(draws), threads, [&](std::size_t k) {
      auto ws = pool.acquire();
      try {
        const auto x = model.sample_conditional(*ws, rep.posterior.codec.decode(thetas[k]), s.values, 1, derive_seed(opt.seed, 1000 + k));
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rep.n));
        if (opt.trend) c += model.map_block(x.col(0), model.trend_offset());
        if (opt.intercept) c.array() += x(model.intercept_offset(), 0);
        if (opt.slope) {
          const auto& cov = model.slope_covariate();
          for (std::size_t i = 0; i < rep.n; ++i) c(static_cast<Eigen::Index>(i)) += x(model.slope_offset(), 0) * cov[i];
        }
        curves.col(static_cast<Eigen::Index>(k)) = c;
        ok[k] = 1;
      } catch (const NumericalError&) {
      }
    });
    Band band;
    band.mean.resize(rep.n);
    band.lo.resize(rep.n);
    band.hi.resize(rep.n);
    std::vector<double> row;
    for (std::size_t i = 0; i < rep.n; ++i) {
      row.clear();
      for (int k = 0; k < draws; ++k)
        if (ok[k]) row.push_back(curves(static_cast<Eigen::Index>(i), k));
      if (row.empty()) throw NumericalError("fit: every trend draw failed");
      std::sort(row.begin(), row.end());
      double m = 0.0;
      for (double v : row) m += v;
      m /= static_cast<double>(row.size());
      band.mean[i] = s.destandardize(m);
      band.lo[i] = s.destandardize(detail::sorted_quantile(row, 0.025));
      band.hi[i] = s.destandardize(detail::sorted_quantile(row, 0.975));
    }
    const auto failed = static_cast<int>(std::count(ok.begin(), ok.end(), 0));
    if (failed > 0) rep.warnings.push_back(std::to_string(failed) + " trend draws failed and were skipped");
    rep.trend = std::move(band);
  }
  return rep;
}

}  // namespace tvfgn
