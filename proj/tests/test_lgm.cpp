#include "catch_amalgamated.hpp"

#include <random>

#include "oracles.hpp"
#include "tvfgn/lgm.hpp"
#include "tvfgn/stats.hpp"

using namespace tvfgn;
using Catch::Approx;

namespace {

std::vector<double> regular_times(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i + 1);
  return t;
}

struct RandomConfig {
  LatentModelSpec spec;
  HyperParams th;
};

RandomConfig random_config(std::mt19937_64& rng, int rep) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> un(8, 30);
  RandomConfig c;
  auto& s = c.spec;
  const int n = un(rng);
  s.m = rep % 2 == 0 ? 4 : 3;
  s.mixture = true;
  s.trend = rep % 3 != 0;
  s.intercept = rep % 2 == 1 || rep == 4;
  s.slope = rep == 5 || rep == 8;
  s.time_varying_sd = rep % 4 == 2;
  s.obs_precision = rep == 7 ? 50.0 : kTauHigh;
  if (rep % 5 == 3) {
    // irregular times mapped from a coarser regular grid
    s.timestamps = {0.0};
    for (int i = 1; i < n; ++i) s.timestamps.push_back(s.timestamps.back() + 0.6 + 1.5 * u(rng));
    s.interp = interpolation_matrix(s.timestamps, 1.0);
  } else {
    s.timestamps = regular_times(static_cast<std::size_t>(n));
  }
  if (rep == 9) {
    const std::size_t big_m = s.interp ? s.interp->grid.size() : s.timestamps.size();
    std::vector<double> w(big_m);
    for (std::size_t j = 0; j < big_m; ++j) w[j] = 0.5 + 0.4 * std::sin(0.7 * static_cast<double>(j));
    s.grid_weights = w;
  }
  c.th.tau = 0.3 + 3.0 * u(rng);
  c.th.h1 = 0.5 + 0.49 * u(rng);
  c.th.h2 = 0.5 + 0.49 * u(rng);
  if (s.time_varying_sd) c.th.beta = -4.0 + 8.0 * u(rng);
  if (s.trend) c.th.trend_precision = std::exp(-2.0 + 4.0 * u(rng));
  return c;
}

Eigen::VectorXd noisy_ramp(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z;
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (auto& v : y) v = z(rng);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.05 * static_cast<double>(i);
  return y;
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("lgm: conditional mean and marginal likelihood equal the dense oracle", "[lgm][oracle]") {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 10; ++rep) {
    const auto cfg = random_config(rng, rep);
    const LatentModel model(cfg.spec);
    const auto y = noisy_ramp(rng, model.observations());
    const auto dense = oracle::condition(model, cfg.th, y);
    const auto cond = condition_on_data(model, cfg.th, as_span(y));
    const double lml = log_marginal_likelihood(model, cfg.th, as_span(y));
    INFO("rep " << rep << " n=" << model.observations() << " trend=" << cfg.spec.trend << " intercept=" << cfg.spec.intercept
                << " slope=" << cfg.spec.slope << " beta=" << cfg.spec.time_varying_sd << " interp=" << cfg.spec.interp.has_value());
    REQUIRE(cond.mean.size() == static_cast<Eigen::Index>(model.dimension()));
    CHECK((cond.mean - dense.mean).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(lml == Approx(dense.log_marginal).margin(1e-6));
  }
}

TEST_CASE("lgm: n=25 full model against the dense marginal density of y", "[lgm][oracle]") {
  LatentModelSpec s;
  s.timestamps = regular_times(25);
  s.trend = s.intercept = s.slope = s.time_varying_sd = true;
  const LatentModel model(s);
  HyperParams th{1.8, 0.62, 0.91, 1.5, 3.0};
  std::mt19937_64 rng(4);
  const auto y = noisy_ramp(rng, 25);
  CHECK(log_marginal_likelihood(model, th, as_span(y)) == Approx(oracle::condition(model, th, y).log_marginal).margin(1e-6));
  CHECK(model.dimension() == 25 + 1 + 1 + 25 * (1 + 2 * 4));
}

TEST_CASE("lgm: rw2 precision annihilates linear functions", "[lgm]") {
  LatentModelSpec s;
  s.timestamps = regular_times(10);
  s.mixture = false;
  s.trend = true;
  const LatentModel model(s);
  HyperParams th;
  th.trend_precision = 2.5;
  const auto jp = assemble_joint_precision(model, th);
  const Eigen::MatrixXd q(jp.matrix);
  REQUIRE(q.rows() == 10);
  for (double a : {0.0, 1.0, -3.0})
    for (double b : {0.0, 0.5, 2.0}) {
      Eigen::VectorXd f(10);
      for (int i = 0; i < 10; ++i) f(i) = a + b * (i + 1);
      CHECK((q * f).cwiseAbs().maxCoeff() < 1e-12);
    }
  // and nothing else: rank M-2
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  int zero = 0;
  for (int i = 0; i < 10; ++i) zero += std::abs(es.eigenvalues()(i)) < 1e-10 ? 1 : 0;
  CHECK(zero == 2);
  CHECK(jp.constraints.rows() == 2);
  CHECK((jp.constraints * jp.constraints.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lgm: scaled rw2 has unit geometric-mean constrained marginal variance", "[lgm]") {
  for (std::size_t big_m : {10, 57, 200}) {
    LatentModelSpec s;
    s.timestamps = regular_times(big_m);
    s.mixture = false;
    s.trend = true;
    const LatentModel model(s);
    HyperParams th;
    th.trend_precision = 1.0;
    const Eigen::MatrixXd q(assemble_joint_precision(model, th).matrix);
    // covariance restricted to the orthogonal complement of the null space
    const Eigen::MatrixXd cov = oracle::symmetric_pinv(q);
    double lg = 0.0;
    for (std::size_t j = 0; j < big_m; ++j) lg += std::log(cov(j, j));
    INFO("M=" << big_m);
    CHECK(std::exp(lg / static_cast<double>(big_m)) == Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("lgm: mixture-only joint precision is the stacked precision", "[lgm]") {
  const LatentModel model(mixture_only_spec(40, 3));
  HyperParams th{2.0, 0.6, 0.85, std::nullopt, std::nullopt};
  const auto jp = assemble_joint_precision(model, th);
  const auto sp = stacked_precision(model.mixture_spec(th), model.table());
  CHECK(Eigen::MatrixXd(jp.matrix) == Eigen::MatrixXd(sp.matrix));
  CHECK(jp.log_det == sp.log_det);
  CHECK(jp.constraints.size() == 0);
}

TEST_CASE("lgm: full model layout and block sparsity", "[lgm]") {
  LatentModelSpec s;
  s.timestamps = {0.0, 1.5, 2.2, 4.0, 5.5, 6.1, 8.0, 9.3, 11.0, 12.4, 14.0};
  s.interp = interpolation_matrix(s.timestamps, 1.0);
  s.trend = s.intercept = true;
  const LatentModel model(s);
  const std::size_t big_m = model.grid_size();
  CHECK(big_m == 15);
  CHECK(model.dimension() == big_m + 1 + big_m * (1 + 2 * 4));
  CHECK(model.trend_offset() == 0);
  CHECK(model.intercept_offset() == static_cast<int>(big_m));
  CHECK(model.mixture_offset() == static_cast<int>(big_m) + 1);
  HyperParams th{1.0, 0.7, 0.8, std::nullopt, 1.0};
  const Eigen::MatrixXd q(assemble_joint_precision(model, th).matrix);
  const int mo = model.mixture_offset();
  for (int r = 0; r < q.rows(); ++r)
    for (int c = 0; c < q.cols(); ++c) {
      if (q(r, c) == 0.0) continue;
      const bool both_trend = r < mo - 1 && c < mo - 1;
      const bool both_mix = r >= mo && c >= mo;
      const bool intercept = r == mo - 1 && c == mo - 1;
      REQUIRE((both_trend || both_mix || intercept));
      if (both_trend) REQUIRE(std::abs(r - c) <= 2);
    }
}

TEST_CASE("lgm: nearly noise-free observations are reproduced by the mixture", "[lgm]") {
  const LatentModel model(mixture_only_spec(200));
  HyperParams th{1.0, 0.6, 0.9, std::nullopt, std::nullopt};
  const auto y = simulate_mixture(model.mixture_spec(th), 12);
  const auto cond = condition_on_data(model, th, y);
  const Eigen::VectorXd eps = cond.mean.segment(model.mixture_offset(), 200);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), 200);
  CHECK(std::sqrt((eps - yv).squaredNorm() / 200.0) < 1e-4);
}

TEST_CASE("lgm: zero data gives zero conditional mean", "[lgm]") {
  LatentModelSpec s;
  s.timestamps = regular_times(60);
  s.trend = s.intercept = s.slope = s.time_varying_sd = true;
  const LatentModel model(s);
  HyperParams th{1.0, 0.6, 0.9, 0.7, 5.0};
  const std::vector<double> y(60, 0.0);
  CHECK(condition_on_data(model, th, y).mean.cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(condition_on_data(model, th, std::vector<double>(59, 0.0)), ArgumentError);
}

TEST_CASE("lgm: shifting y moves the intercept and the likelihood continuously", "[lgm]") {
  LatentModelSpec s;
  s.timestamps = regular_times(150);
  s.intercept = true;
  const LatentModel model(s);
  HyperParams th{1.0, 0.6, 0.8, std::nullopt, std::nullopt};
  const auto y = simulate_mixture(model.mixture_spec(th), 3);
  const double c = 4.0;
  std::vector<double> yc(y);
  for (double& v : yc) v += c;
  const int io = model.intercept_offset();
  const double b0 = condition_on_data(model, th, y).mean(io);
  const double b1 = condition_on_data(model, th, yc).mean(io);
  CHECK(b1 - b0 == Approx(c).epsilon(0.01));
  double prev = log_marginal_likelihood(model, th, y);
  for (int k = 1; k <= 10; ++k) {
    std::vector<double> yk(y);
    for (double& v : yk) v += 1e-3 * k;
    const double cur = log_marginal_likelihood(model, th, yk);
    CHECK(std::abs(cur - prev) < 1e-2);
    prev = cur;
  }
}

TEST_CASE("lgm: equal exponents recover the exact fGn likelihood up to cascade error", "[lgm][oracle]") {
  const int n = 50;
  const double h = 0.8, tau = 1.4;
  // constant weight: with a time-varying weight the pair covariance carries
  // the factor cos(asin(sqrt(w_i)) - asin(sqrt(w_j))) and is not fGn
  auto spec = mixture_only_spec(n);
  spec.grid_weights = std::vector<double>(n, 0.3);
  const LatentModel model(spec);
  HyperParams th{tau, h, h, std::nullopt, std::nullopt};
  const auto ys = simulate_fgn(HurstExponent(h), n, 21).values;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = ys[i] / std::sqrt(tau);
  const double lib = log_marginal_likelihood(model, th, as_span(y));

  const double noise = 1.0 / kTauHigh + 1.0 / model.spec().obs_precision;
  const Eigen::MatrixXd s_exact = oracle::fgn_covariance(h, n, tau) + noise * Eigen::MatrixXd::Identity(n, n);
  const auto r = model.table().lookup(HurstExponent(h)).acf_vector(n);
  Eigen::MatrixXd s_cas(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s_cas(i, j) = r[std::abs(i - j)] / tau + (i == j ? noise : 0.0);
  CHECK(lib == Approx(oracle::gaussian_logpdf(y, s_cas)).margin(1e-6));

  // first-order perturbation size of the cascade substitution
  const Eigen::MatrixXd ds = s_cas - s_exact;
  const Eigen::MatrixXd si = s_exact.inverse();
  const Eigen::VectorXd a = si * y;
  const double delta = 0.5 * std::abs((si * ds).trace()) + 0.5 * std::abs(a.dot(ds * a));
  const double exact = oracle::gaussian_logpdf(y, s_exact);
  INFO("exact " << exact << " lib " << lib << " delta " << delta);
  CHECK(std::abs(lib - exact) <= 2.0 * delta + 1e-6);
  CHECK(exact == Approx(fgn_logdensity(std::span<const double>(y.data(), n), HurstExponent(h), tau)).epsilon(1e-4));
}

TEST_CASE("lgm: trend RMSE decreases with the series length", "[lgm]") {
  HyperParams th{4.0, 0.6, 0.8, std::nullopt, 50.0};
  auto rmse = [&](std::size_t n, std::uint64_t seed) {
    LatentModelSpec s;
    s.timestamps = regular_times(n);
    s.trend = s.intercept = s.slope = true;
    const LatentModel model(s);
    const auto noise = simulate_mixture(model.mixture_spec(th), seed);
    std::vector<double> y(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n - 1);
      truth[i] = std::sin(2.0 * std::numbers::pi * u) + 0.5 * u;
      y[i] = truth[i] + noise[i];
    }
    const auto cond = condition_on_data(model, th, y);
    const Eigen::VectorXd trend = model.map_block(cond.mean, model.trend_offset());
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fit = trend(static_cast<Eigen::Index>(i)) + cond.mean(model.intercept_offset()) +
                         cond.mean(model.slope_offset()) * model.slope_covariate()[i];
      ss += (fit - truth[i]) * (fit - truth[i]);
    }
    return std::sqrt(ss / static_cast<double>(n));
  };
  double small = 0.0, large = 0.0;
  for (int r = 0; r < 20; ++r) {
    small += rmse(200, 100 + r);
    large += rmse(800, 200 + r);
  }
  INFO("mean RMSE n=200 " << small / 20 << ", n=800 " << large / 20);
  CHECK(large < small);
}

TEST_CASE("lgm: stiff trends with an intercept factorize; draws obey the constraints", "[lgm]") {
  // a smooth-trend region of a real posterior where the intercept direction
  // used to lose positive definiteness
  const auto raw = simulate_mixture(make_mixture(0.6, 0.6, 500, 1.0, 3.0), 4);
  const auto y = standardize(raw);
  for (bool slope : {false, true}) {
    LatentModelSpec s;
    s.timestamps = regular_times(500);
    s.trend = s.intercept = s.time_varying_sd = true;
    s.slope = slope;
    const LatentModel model(s);
    LatentModel::Workspace ws(model);
    for (double tp : {877.0, 3547.87, 22833.0, 36917.0, 1e6}) {
      HyperParams th{1.00912, 0.543144, 0.592309, 3.48942, tp};
      INFO("slope " << slope << " trend precision " << tp);
      const auto ev = model.evaluate(ws, th, y, true);
      CHECK(std::isfinite(ev.log_marginal));
      const Eigen::MatrixXd x = model.sample_conditional(ws, th, y, 5, 3);
      CHECK((model.constraints() * x).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((model.constraints() * ev.conditional.mean).cwiseAbs().maxCoeff() < 1e-8);
      const Eigen::Map<const Eigen::VectorXd> yv(y.data(), 500);
      for (int k = 0; k < 5; ++k) CHECK((model.predictor(x.col(k)) - yv).cwiseAbs().maxCoeff() < 0.05);
    }
  }
  // the reparameterized system still matches the dense oracle on a short series
  LatentModelSpec small;
  small.timestamps = regular_times(24);
  small.trend = small.intercept = small.slope = small.time_varying_sd = true;
  const LatentModel sm(small);
  std::mt19937_64 rng(77);
  const auto ys = noisy_ramp(rng, 24);
  for (double tp : {1.0, 1e3}) {
    HyperParams th{1.3, 0.6, 0.8, -1.0, tp};
    const auto dense = oracle::condition(sm, th, ys);
    CHECK((condition_on_data(sm, th, as_span(ys)).mean - dense.mean).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(log_marginal_likelihood(sm, th, as_span(ys)) == Approx(dense.log_marginal).margin(1e-6));
  }
}
