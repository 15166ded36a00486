#pragma once

// JSON views of library results for the command-line tool.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvfgn/config.hpp"
#include "tvfgn/evalharness.hpp"
#include "tvfgn/fit.hpp"

namespace tvfgn::cli {

using nlohmann::ordered_json;

inline ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline ordered_json numbers(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline ordered_json to_json(const KeyValueConfig& c) {
  ordered_json o = ordered_json::object();
  for (const auto& k : c.keys_in_order()) o[k] = c.values().at(k);
  return o;
}

inline ordered_json to_json(const PriorConfig& p) {
  return {{"tau_u", p.tau_u},
          {"tau_alpha", p.tau_alpha},
          {"hurst_lambda", p.resolved_hurst_lambda()},
          {"hurst_n_ref", p.hurst_n_ref},
          {"beta_scale", p.beta_scale},
          {"trend_u", p.trend_u},
          {"trend_alpha", p.trend_alpha}};
}

inline ordered_json to_json(const ExplorationConfig& e) {
  return {{"design", design_name(e.design)},
          {"grid_step", e.grid_step},
          {"grid_drop", e.grid_drop},
          {"max_points", e.max_points},
          {"ccd_cap_sd", e.ccd_cap_sd},
          {"hessian_step", e.hessian_step},
          {"min_curvature", e.min_curvature},
          {"optimizer_max_iterations", e.bfgs.max_iterations},
          {"optimizer_gradient_tolerance", e.bfgs.gradient_tolerance},
          {"optimizer_fd_step", e.bfgs.fd_step}};
}

inline ordered_json to_json(const FitOptions& f) {
  ordered_json o{{"trend", f.trend},
                 {"intercept", f.intercept},
                 {"slope", f.slope},
                 {"time_varying_sd", f.time_varying_sd},
                 {"m", f.m},
                 {"grid_step", f.grid_step ? ordered_json(*f.grid_step) : ordered_json(nullptr)},
                 {"probability_draws", f.probability_draws},
                 {"trend_draws", f.trend_draws},
                 {"curve_points", f.curve_points},
                 {"seed", f.seed}};
  o["priors"] = to_json(f.priors);
  o["exploration"] = to_json(f.exploration);
  return o;
}

inline ordered_json to_json(const ExperimentConfig& e) {
  ordered_json combos = ordered_json::array();
  for (const auto& c : e.combinations) combos.push_back({c.h1, c.h2});
  ordered_json nq = ordered_json::object();
  for (const auto& [n, q] : e.null_quantiles) nq[std::to_string(n)] = q;
  ordered_json o{{"lengths", e.lengths},
                 {"combinations", combos},
                 {"replicates", e.replicates},
                 {"seed", e.seed},
                 {"alpha", e.alpha},
                 {"window_fraction", e.window_fraction},
                 {"null_h0", e.null_h0},
                 {"null_replicates", e.null_replicates},
                 {"null_quantiles", nq},
                 {"probability_draws", e.probability_draws},
                 {"standardize", e.standardize},
                 {"m", e.m}};
  o["priors"] = to_json(e.priors);
  o["exploration"] = to_json(e.exploration);
  return o;
}

inline ordered_json to_json(const MarginalSummary& m) {
  return {{"mean", number(m.mean)}, {"sd", number(m.sd)}, {"q025", number(m.q025)}, {"q500", number(m.q500)}, {"q975", number(m.q975)}};
}

inline ordered_json to_json(const FitReport& r) {
  ordered_json o;
  o["n"] = r.n;
  o["standardization"] = {{"mean", r.standardization.mean}, {"sd", r.standardization.sd}};
  o["sampling"] = {{"regular", r.regular}, {"grid_step", r.grid_step}, {"grid_size", r.grid_size}};
  ordered_json hyper = ordered_json::object();
  for (const auto& m : r.marginals) hyper[m.name] = to_json(m);
  o["hyperparameters"] = hyper;
  o["prob_increase"] = number(r.increase.p);
  o["difference_H2_minus_H1"] = {{"mean", number(r.increase.diff_mean)},
                                 {"q025", number(r.increase.diff_lo)},
                                 {"q975", number(r.increase.diff_hi)},
                                 {"samples", r.increase.samples}};
  const auto& post = r.posterior;
  ordered_json mode = ordered_json::object();
  mode["tau"] = post.mode_params.tau;
  mode["H1"] = post.mode_params.h1;
  mode["H2"] = post.mode_params.h2;
  if (post.mode_params.beta) mode["beta"] = *post.mode_params.beta;
  if (post.mode_params.trend_precision) mode["trend_precision"] = *post.mode_params.trend_precision;
  o["posterior_mode"] = mode;
  o["exploration"] = {{"design", design_name(post.design)},
                      {"points", post.points.size()},
                      {"evaluations", post.evaluations},
                      {"optimizer_converged", post.optimizer_converged}};
  o["reconstruction_rms"] = number(r.reconstruction_rms);
  o["hurst_curve"] = {{"first", number(r.hurst_curve.front())}, {"last", number(r.hurst_curve.back())}};
  o["warnings"] = r.warnings;
  return o;
}

inline ordered_json to_json(const EstimationReport& rep) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"n", r.n},
                    {"H1", r.h1},
                    {"H2", r.h2},
                    {"completed", r.completed},
                    {"failed", r.failed},
                    {"mean_H1", number(r.mean_h1)},
                    {"mean_H2", number(r.mean_h2)},
                    {"rmse_H1", number(r.rmse1)},
                    {"rmse_H2", number(r.rmse2)},
                    {"proportion_H2_gt_H1", number(r.proportion)},
                    {"mean_phat", number(r.mean_phat)}});
  ordered_json failures = ordered_json::array();
  for (const auto& rec : rep.records)
    if (!rec.ok) failures.push_back({{"n", rec.n}, {"replicate", rec.replicate}, {"seed", rec.seed}, {"error", rec.error}});
  return {{"rows", rows}, {"failures", failures}};
}

inline ordered_json to_json(const MethodReport& m) {
  return {{"threshold", number(m.threshold)},
          {"tp", m.metrics.tp},
          {"fp", m.metrics.fp},
          {"tn", m.metrics.tn},
          {"fn", m.metrics.fn},
          {"tpr", number(m.metrics.tpr)},
          {"fpr", number(m.metrics.fpr)},
          {"ppv", number(m.metrics.ppv)},
          {"npv", number(m.metrics.npv)},
          {"auc", number(m.roc.auc)}};
}

inline ordered_json to_json(const ClassificationReport& rep) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rep.results) {
    ordered_json failures = ordered_json::array();
    for (const auto& rec : r.records)
      if (!rec.ok) failures.push_back({{"replicate", rec.replicate}, {"seed", rec.seed}, {"error", rec.error}});
    arr.push_back({{"n", r.n},
                   {"w", r.w},
                   {"null_quantile", r.null_quantile},
                   {"failed", r.failed},
                   {"phat", to_json(r.phat)},
                   {"kendall_tau", to_json(r.tau)},
                   {"failures", failures}});
  }
  return arr;
}

}  // namespace tvfgn::cli
