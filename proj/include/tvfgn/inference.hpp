#pragma once

// Hyperparameter posterior for the latent model: mode search, curvature,
// exploration on a lattice or a central composite design, Monte Carlo
// probability of increasing memory and marginal summaries.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/lgm.hpp"
#include "tvfgn/optimize.hpp"
#include "tvfgn/parallel.hpp"
#include "tvfgn/priors.hpp"
#include "tvfgn/stats.hpp"

namespace tvfgn {

struct PriorConfig {
  double tau_u = 1.0;
  double tau_alpha = 0.01;
  std::optional<double> hurst_lambda;  ///< default: P(H > 0.9) = 0.1
  int hurst_n_ref = 100;
  double beta_scale = 1.0;
  double trend_u = 1.0;
  double trend_alpha = 0.01;

  [[nodiscard]] double resolved_hurst_lambda() const { return hurst_lambda ? *hurst_lambda : pc_hurst_rate(0.9, 0.1, hurst_n_ref); }
};

/// Maps HyperParams to the unconstrained vector
/// (log tau, logit((H1-0.5)/0.49), logit((H2-0.5)/0.49), [beta], [log tau_trend]).
class HyperCodec {
 public:
  HyperCodec(bool beta, bool trend) : beta_(beta), trend_(trend) {}

  [[nodiscard]] int dim() const noexcept { return 3 + (beta_ ? 1 : 0) + (trend_ ? 1 : 0); }
  [[nodiscard]] bool has_beta() const noexcept { return beta_; }
  [[nodiscard]] bool has_trend() const noexcept { return trend_; }
  [[nodiscard]] int beta_index() const noexcept { return beta_ ? 3 : -1; }
  [[nodiscard]] int trend_index() const noexcept { return trend_ ? 3 + (beta_ ? 1 : 0) : -1; }

  static double h_to_x(double h) {
    const double u = (h - 0.5) / 0.49;
    return std::log(u / (1.0 - u));
  }
  static double x_to_h(double x) { return 0.5 + 0.49 / (1.0 + std::exp(-x)); }
  /// log dH/dx
  static double log_dh_dx(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::log(0.49) + std::log(s) + std::log1p(-s);
  }

  [[nodiscard]] Eigen::VectorXd encode(const HyperParams& p) const {
    Eigen::VectorXd x(dim());
    x(0) = std::log(p.tau);
    x(1) = h_to_x(p.h1);
    x(2) = h_to_x(p.h2);
    if (beta_) x(beta_index()) = p.beta.value_or(0.0);
    if (trend_) x(trend_index()) = std::log(p.trend_precision.value_or(1.0));
    return x;
  }

  [[nodiscard]] HyperParams decode(const Eigen::VectorXd& x) const {
    HyperParams p;
    p.tau = std::exp(x(0));
    p.h1 = std::clamp(x_to_h(x(1)), HurstExponent::kMin, HurstExponent::kMax);
    p.h2 = std::clamp(x_to_h(x(2)), HurstExponent::kMin, HurstExponent::kMax);
    if (beta_) p.beta = x(beta_index());
    if (trend_) p.trend_precision = std::exp(x(trend_index()));
    return p;
  }

  /// Log prior density of the internal vector, Jacobians included.
  [[nodiscard]] double log_prior(const Eigen::VectorXd& x, const PriorConfig& pc, double hurst_lambda) const {
    const HyperParams p = decode(x);
    double lp = pc_prior_precision(p.tau, pc.tau_u, pc.tau_alpha) + x(0);
    for (int i : {1, 2}) {
      const double h = x_to_h(x(i));
      if (!(h > 0.5)) return -std::numeric_limits<double>::infinity();
      lp += pc_prior_hurst(HurstExponent(std::min(h, HurstExponent::kMax)), hurst_lambda, pc.hurst_n_ref) + log_dh_dx(x(i));
    }
    if (beta_) lp += laplace_prior_beta(x(beta_index()), pc.beta_scale);
    if (trend_) lp += pc_prior_precision(*p.trend_precision, pc.trend_u, pc.trend_alpha) + x(trend_index());
    return lp;
  }

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out{"tau", "H1", "H2"};
    if (beta_) out.emplace_back("beta");
    if (trend_) out.emplace_back("trend_precision");
    return out;
  }

  /// User-scale value of internal coordinate i.
  [[nodiscard]] double to_user(int i, double x) const {
    if (i == 1 || i == 2) return x_to_h(x);
    if (i == beta_index()) return x;
    return std::exp(x);
  }

 private:
  bool beta_;
  bool trend_;
};

enum class Design { Automatic, Grid, Ccd };

struct ExplorationConfig {
  Design design = Design::Automatic;
  double grid_step = 0.75;       ///< lattice spacing in standardized coordinates
  double grid_drop = 4.0;        ///< stop expanding where the log posterior falls this far below the mode
  std::size_t max_points = 4000;
  double ccd_cap_sd = 0.5;       ///< sd of the local Gaussian around each CCD point
  double hessian_step = 0.02;
  double min_curvature = 1e-2;
  optimize::BfgsOptions bfgs{200, 2e-3, 1e-10, 1e-3, 2.0};
  unsigned threads = 1;
  bool keep_conditionals = false;
};

struct PosteriorPoint {
  Eigen::VectorXd theta;  ///< internal coordinates
  Eigen::VectorXd z;      ///< standardized coordinates
  HyperParams params;
  double log_post = 0.0;
  double weight = 0.0;
  std::optional<Eigen::VectorXd> latent_mean;
};

struct HyperPosterior {
  HyperCodec codec{false, false};
  std::vector<std::string> names;
  std::vector<PosteriorPoint> points;
  Eigen::VectorXd centre;   ///< optimizer result, origin of z
  Eigen::MatrixXd scale;    ///< theta = centre + scale * z
  Eigen::MatrixXd hessian;  ///< negative log-posterior Hessian at the centre
  Eigen::VectorXd mode;     ///< best explored point
  HyperParams mode_params;
  double mode_log_post = -std::numeric_limits<double>::infinity();
  double cap_sd = 0.0;      ///< per-point Gaussian sd in z
  Design design = Design::Grid;
  int evaluations = 0;
  std::vector<double> optimizer_trace;
  bool optimizer_converged = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<double> normalize_weights(std::span<const double> log_post) {
  const double top = *std::max_element(log_post.begin(), log_post.end());
  std::vector<double> w(log_post.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::isfinite(log_post[i]) ? std::exp(log_post[i] - top) : 0.0;
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace detail

/// Log posterior (up to a constant) on the internal scale.
class PosteriorObjective {
 public:
  PosteriorObjective(const LatentModel& model, std::span<const double> y, PriorConfig priors)
      : model_(&model),
        y_(y.begin(), y.end()),
        priors_(priors),
        codec_(model.spec().time_varying_sd, model.spec().trend),
        lambda_(priors.resolved_hurst_lambda()),
        pool_(model) {
    if (!model.spec().mixture) throw ArgumentError("explore_posterior: the model must contain the mixture component");
  }

  [[nodiscard]] const HyperCodec& codec() const noexcept { return codec_; }
  [[nodiscard]] const LatentModel& model() const noexcept { return *model_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return y_; }

  double operator()(const Eigen::VectorXd& x) { return evaluate(x, nullptr); }

  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* latent_mean) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!std::isfinite(x(i))) return -std::numeric_limits<double>::infinity();
    if (std::abs(x(0)) > 30.0 || std::abs(x(1)) > 30.0 || std::abs(x(2)) > 30.0) return -std::numeric_limits<double>::infinity();
    const double lp = codec_.log_prior(x, priors_, lambda_);
    if (!std::isfinite(lp)) return lp;
    auto ws = pool_.acquire();
    try {
      auto ev = model_->evaluate(*ws, codec_.decode(x), y_, latent_mean != nullptr);
      if (latent_mean) *latent_mean = std::move(ev.conditional.mean);
      return ev.log_marginal + lp;
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

 private:
  const LatentModel* model_;
  std::vector<double> y_;
  PriorConfig priors_;
  HyperCodec codec_;
  double lambda_;
  WorkspacePool pool_;
};

inline HyperPosterior explore_posterior(const LatentModel& model, std::span<const double> y, const PriorConfig& priors = {},
                                        const ExplorationConfig& cfg = {}) {
  if (y.size() != model.observations()) throw ArgumentError("explore_posterior: data length differs from the model");
  PosteriorObjective objective(model, y, priors);
  const HyperCodec& codec = objective.codec();
  const int d = codec.dim();
  HyperPosterior post;
  post.codec = codec;
  post.names = codec.names();

  // starting point: best of a few coarse candidates
  Eigen::VectorXd start;
  double start_val = -std::numeric_limits<double>::infinity();
  const double pairs[][2] = {{0.6, 0.6}, {0.75, 0.75}, {0.9, 0.9}, {0.6, 0.85}, {0.85, 0.6}};
  for (const auto& pr : pairs) {
    HyperParams p;
    p.tau = 1.0;
    p.h1 = pr[0];
    p.h2 = pr[1];
    if (codec.has_beta()) p.beta = 0.0;
    if (codec.has_trend()) p.trend_precision = 10.0;
    const Eigen::VectorXd x = codec.encode(p);
    const double v = objective(x);
    ++post.evaluations;
    if (v > start_val) {
      start_val = v;
      start = x;
    }
  }
  if (!std::isfinite(start_val)) throw NumericalError("explore_posterior: log posterior is not finite at any starting point");

  auto negative = [&](const Eigen::VectorXd& x) { return -objective(x); };
  optimize::BfgsResult opt;
  try {
    opt = optimize::bfgs_minimize(negative, start, cfg.bfgs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("explore_posterior: optimizer failed: ") + e.what());
  }
  post.evaluations += opt.evaluations;
  post.optimizer_trace = opt.trace;
  post.optimizer_converged = opt.converged;
  if (!std::isfinite(opt.value)) {
    std::string trace;
    for (double v : opt.trace) trace += " " + std::to_string(v);
    throw NumericalError("explore_posterior: optimizer diverged; trace:" + trace);
  }
  if (!opt.converged) post.warnings.push_back("optimizer stopped before meeting the gradient tolerance");
  post.centre = opt.x;
  const double centre_val = -opt.value;

  // curvature and standardization
  post.hessian = optimize::fd_hessian(negative, post.centre, cfg.hessian_step, opt.value, post.evaluations);
  post.hessian = 0.5 * (post.hessian + post.hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(post.hessian);
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!(lam(i) > cfg.min_curvature)) {
      lam(i) = cfg.min_curvature;
      if (post.warnings.empty() || post.warnings.back().rfind("non-positive", 0) != 0)
        post.warnings.push_back("non-positive curvature at the mode; floored");
    }
  }
  post.scale = es.eigenvectors() * lam.cwiseInverse().cwiseSqrt().asDiagonal();

  Design design = cfg.design;
  if (design == Design::Automatic) design = d <= 3 ? Design::Grid : Design::Ccd;
  post.design = design;

  auto theta_of = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd { return post.centre + post.scale * z; };
  std::vector<Eigen::VectorXd> zs;
  std::vector<double> lps;
  std::vector<double> design_weight;

  auto eval_batch = [&](const std::vector<Eigen::VectorXd>& batch) {
    std::vector<double> out(batch.size());
    parallel_for(batch.size(), cfg.threads, [&](std::size_t i) { out[i] = objective(theta_of(batch[i])); });
    post.evaluations += static_cast<int>(batch.size());
    return out;
  };

  if (design == Design::Grid) {
    post.cap_sd = cfg.grid_step / std::sqrt(12.0);
    std::map<std::vector<int>, double> seen;
    std::vector<std::vector<int>> frontier{std::vector<int>(d, 0)};
    seen[frontier.front()] = centre_val;
    zs.emplace_back(Eigen::VectorXd::Zero(d));
    lps.push_back(centre_val);
    while (!frontier.empty() && zs.size() < cfg.max_points) {
      std::vector<std::vector<int>> candidates;
      for (const auto& idx : frontier) {
        for (int k = 0; k < d; ++k) {
          for (int s : {-1, 1}) {
            auto nb = idx;
            nb[k] += s;
            if (seen.count(nb)) continue;
            seen[nb] = std::numeric_limits<double>::quiet_NaN();
            candidates.push_back(std::move(nb));
          }
        }
      }
      std::vector<Eigen::VectorXd> batch;
      for (const auto& c : candidates) {
        Eigen::VectorXd z(d);
        for (int k = 0; k < d; ++k) z(k) = cfg.grid_step * c[k];
        batch.push_back(z);
      }
      const auto vals = eval_batch(batch);
      frontier.clear();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        seen[candidates[i]] = vals[i];
        zs.push_back(batch[i]);
        lps.push_back(vals[i]);
        if (std::isfinite(vals[i]) && centre_val - vals[i] < cfg.grid_drop) frontier.push_back(candidates[i]);
      }
    }
    if (!frontier.empty()) post.warnings.push_back("grid exploration hit the point limit");
    design_weight.assign(zs.size(), 1.0);
  } else {
    post.cap_sd = cfg.ccd_cap_sd;
    const double f = 1.1 * std::sqrt(static_cast<double>(d));
    zs.emplace_back(Eigen::VectorXd::Zero(d));
    for (int k = 0; k < d; ++k)
      for (int s : {-1, 1}) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
        z(k) = s * f;
        zs.push_back(z);
      }
    for (int mask = 0; mask < (1 << d); ++mask) {
      Eigen::VectorXd z(d);
      for (int k = 0; k < d; ++k) z(k) = ((mask >> k) & 1) ? f / std::sqrt(static_cast<double>(d)) : -f / std::sqrt(static_cast<double>(d));
      zs.push_back(z);
    }
    std::vector<Eigen::VectorXd> rest(zs.begin() + 1, zs.end());
    const auto vals = eval_batch(rest);
    lps.push_back(centre_val);
    lps.insert(lps.end(), vals.begin(), vals.end());
    // weights integrate second moments of a standard normal exactly
    const double n1 = static_cast<double>(rest.size());
    design_weight.assign(zs.size(), 1.0);
    design_weight[0] = n1 * (f * f / d - 1.0) * std::exp(-0.5 * f * f);
  }

  std::vector<double> adjusted(lps.size());
  for (std::size_t i = 0; i < lps.size(); ++i) adjusted[i] = lps[i] + std::log(design_weight[i]);
  const auto w = detail::normalize_weights(adjusted);
  std::size_t usable = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (!std::isfinite(lps[i])) continue;
    ++usable;
    PosteriorPoint pt;
    pt.z = zs[i];
    pt.theta = theta_of(zs[i]);
    pt.params = codec.decode(pt.theta);
    pt.log_post = lps[i];
    pt.weight = w[i];
    post.points.push_back(std::move(pt));
  }
  if (usable < 5) throw NumericalError("explore_posterior: fewer than 5 usable design points");

  // best explored point is the reported mode
  std::size_t best = 0;
  for (std::size_t i = 1; i < post.points.size(); ++i)
    if (post.points[i].log_post > post.points[best].log_post) best = i;
  post.mode = post.points[best].theta;
  post.mode_params = post.points[best].params;
  post.mode_log_post = post.points[best].log_post;

  if (cfg.keep_conditionals) {
    parallel_for(post.points.size(), cfg.threads, [&](std::size_t i) {
      Eigen::VectorXd mean;
      objective.evaluate(post.points[i].theta, &mean);
      post.points[i].latent_mean = std::move(mean);
    });
  }
  return post;
}

struct IncreaseProbability {
  double p = 0.0;        ///< P(H2 > H1 | y)
  double diff_lo = 0.0;  ///< 2.5% quantile of H2 - H1
  double diff_hi = 0.0;  ///< 97.5% quantile
  double diff_mean = 0.0;
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};

namespace detail {

/// Draws internal-coordinate samples from the weighted-point approximation.
inline void sample_points(const HyperPosterior& post, std::size_t count, std::uint64_t seed, const std::function<void(const Eigen::VectorXd&)>& sink) {
  std::vector<double> w;
  w.reserve(post.points.size());
  for (const auto& p : post.points) w.push_back(p.weight);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::normal_distribution<double> normal;
  std::mt19937_64 rng(seed);
  const Eigen::Index d = post.centre.size();
  Eigen::VectorXd z(d);
  for (std::size_t s = 0; s < count; ++s) {
    const auto& pt = post.points[pick(rng)];
    for (Eigen::Index k = 0; k < d; ++k) z(k) = pt.z(k) + post.cap_sd * normal(rng);
    sink(post.centre + post.scale * z);
  }
}


}  // namespace detail

/// Monte Carlo estimate of P(H2 > H1 | y) with the 95% interval of H2 - H1.
inline IncreaseProbability prob_increase(const HyperPosterior& post, std::size_t draws = 100000, std::uint64_t seed = 1, unsigned threads = 1) {
  if (draws < 10000) throw ArgumentError("prob_increase: at least 10^4 draws required");
  if (post.points.empty()) throw ArgumentError("prob_increase: empty posterior");
  IncreaseProbability out;
  for (const auto& p : post.points)
    if (p.weight > 0.999) {
      out.warnings.push_back("one design point carries more than 99.9% of the posterior mass");
      break;
    }
  constexpr std::size_t kShards = 8;
  std::vector<std::vector<double>> diffs(kShards);
  parallel_for(kShards, threads, [&](std::size_t s) {
    const std::size_t count = draws / kShards + (s < draws % kShards ? 1 : 0);
    diffs[s].reserve(count);
    detail::sample_points(post, count, derive_seed(seed, s), [&](const Eigen::VectorXd& x) {
      diffs[s].push_back(HyperCodec::x_to_h(x(2)) - HyperCodec::x_to_h(x(1)));
    });
  });
  std::vector<double> all;
  all.reserve(draws);
  for (const auto& v : diffs) all.insert(all.end(), v.begin(), v.end());
  std::size_t positive = 0;
  double sum = 0.0;
  for (double v : all) {
    positive += v > 0.0 ? 1 : 0;
    sum += v;
  }
  out.samples = all.size();
  out.p = static_cast<double>(positive) / static_cast<double>(all.size());
  out.diff_mean = sum / static_cast<double>(all.size());
  std::sort(all.begin(), all.end());
  out.diff_lo = detail::sorted_quantile(all, 0.025);
  out.diff_hi = detail::sorted_quantile(all, 0.975);
  return out;
}

struct MarginalSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q500 = 0.0;
  double q975 = 0.0;
  std::vector<double> x;        ///< user-scale abscissae
  std::vector<double> density;  ///< user-scale density at x
};

/// Per-hyperparameter marginals: each design point contributes a Gaussian in
/// its internal coordinate with variance cap_sd^2 (scale scale')_ii; results
/// are transformed to the user scale.
inline std::vector<MarginalSummary> marginal_summaries(const HyperPosterior& post, int curve_points = 201) {
  if (post.points.empty()) throw ArgumentError("marginal_summaries: empty posterior");
  const auto& codec = post.codec;
  const int d = codec.dim();
  std::vector<MarginalSummary> out;
  const Eigen::MatrixXd cov = post.scale * post.scale.transpose();
  for (int i = 0; i < d; ++i) {
    MarginalSummary ms;
    ms.name = post.names[static_cast<std::size_t>(i)];
    const double s = std::max(post.cap_sd * std::sqrt(cov(i, i)), 1e-9);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : post.points) {
      lo = std::min(lo, p.theta(i) - 6.0 * s);
      hi = std::max(hi, p.theta(i) + 6.0 * s);
    }
    // integrate on a fine internal-scale grid
    const int fine = 4000;
    const double dx = (hi - lo) / (fine - 1);
    std::vector<double> xs(fine), dens(fine, 0.0), cdf(fine, 0.0);
    for (int k = 0; k < fine; ++k) xs[k] = lo + dx * k;
    for (const auto& p : post.points) {
      if (p.weight <= 0.0) continue;
      const double c = p.weight / (s * std::sqrt(2.0 * std::numbers::pi));
      // only the +-8 sd window contributes
      const int a = std::max(0, static_cast<int>((p.theta(i) - 8.0 * s - lo) / dx));
      const int b = std::min(fine - 1, static_cast<int>((p.theta(i) + 8.0 * s - lo) / dx) + 1);
      for (int k = a; k <= b; ++k) {
        const double u = (xs[k] - p.theta(i)) / s;
        dens[k] += c * std::exp(-0.5 * u * u);
      }
    }
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < fine; ++k) {
      const double wk = dens[k] * dx;
      const double u = codec.to_user(i, xs[k]);
      mass += wk;
      m1 += wk * u;
      m2 += wk * u * u;
      cdf[k] = mass;
    }
    ms.mean = m1 / mass;
    ms.sd = std::sqrt(std::max(m2 / mass - ms.mean * ms.mean, 0.0));
    auto quant = [&](double q) {
      const double target = q * mass;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), fine - 1));
      if (k == 0) return codec.to_user(i, xs[0]);
      const double t = (target - cdf[k - 1]) / std::max(cdf[k] - cdf[k - 1], 1e-300);
      return codec.to_user(i, xs[k - 1] + t * dx);
    };
    ms.q025 = quant(0.025);
    ms.q500 = quant(0.5);
    ms.q975 = quant(0.975);
    const int stride = std::max(1, fine / curve_points);
    for (int k = 0; k < fine; k += stride) {
      // density on the user scale: p(x) / |du/dx|
      const double u = codec.to_user(i, xs[k]);
      const double h = 1e-6;
      const double jac = std::abs(codec.to_user(i, xs[k] + h) - codec.to_user(i, xs[k] - h)) / (2.0 * h);
      ms.x.push_back(u);
      ms.density.push_back(jac > 0.0 ? dens[k] / mass / jac : 0.0);
    }
    out.push_back(std::move(ms));
  }
  return out;
}

/// Posterior means of (H1, H2) from the marginal summaries.
inline std::pair<double, double> posterior_mean_hurst(const HyperPosterior& post) {
  const auto ms = marginal_summaries(post, 2);
  return {ms[1].mean, ms[2].mean};
}

}  // namespace tvfgn
