#include "catch_amalgamated.hpp"

#include <random>

#include "tvfgn/baselines.hpp"
#include "tvfgn/fit.hpp"

using namespace tvfgn;
using Catch::Approx;

namespace {

SeriesData regular_series(std::vector<double> v) {
  SeriesData s;
  s.values = std::move(v);
  s.timestamps.resize(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) s.timestamps[i] = static_cast<double>(i + 1);
  s.unit_spacing = true;
  return s;
}

FitOptions quick_options(std::uint64_t seed) {
  FitOptions o;
  o.probability_draws = 20000;
  o.curve_points = 50;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("fit_series: increasing exponent gives a high increase probability", "[fit][slow]") {
  int high = 0;
  for (int r = 0; r < 20; ++r) {
    const auto y = simulate_mixture(make_mixture(0.6, 0.9, 1000), derive_seed(5100, r));
    const auto rep = fit_series(regular_series(y), quick_options(r));
    INFO("seed " << r << " phat " << rep.increase.p);
    high += rep.increase.p >= 0.95 ? 1 : 0;
  }
  CHECK(high >= 19);
}

TEST_CASE("fit_series: stationary series leaves the increase probability undecided", "[fit][slow]") {
  int middle = 0;
  for (int r = 0; r < 20; ++r) {
    const auto y = simulate_fgn(HurstExponent(0.7), 500, derive_seed(5200, r)).values;
    const auto p = fit_series(regular_series(y), quick_options(r)).increase.p;
    UNSCOPED_INFO("seed " << r << " phat " << p);
    middle += p > 0.05 && p < 0.95 ? 1 : 0;
  }
  CHECK(middle >= 18);
}

TEST_CASE("fit_series: thinned irregular sampling agrees with the full series", "[fit]") {
  const auto y = simulate_mixture(make_mixture(0.6, 0.85, 600), 5300);
  const auto full = fit_series(regular_series(y), quick_options(1));

  std::mt19937_64 rng(5301);
  std::bernoulli_distribution keep(0.85);
  SeriesData thin;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i == 0 || i + 1 == y.size() || keep(rng)) {
      thin.timestamps.push_back(static_cast<double>(i + 1));
      thin.values.push_back(y[i]);
    }
  REQUIRE(thin.size() < y.size());
  const auto part = fit_series(thin, quick_options(1));
  CHECK_FALSE(part.regular);
  CHECK(part.grid_step == Approx(1.0));
  CHECK(part.grid_size == 600);

  const auto [f1, f2] = posterior_mean_hurst(full.posterior);
  const auto [p1, p2] = posterior_mean_hurst(part.posterior);
  INFO("full " << f1 << " " << f2 << ", thinned " << p1 << " " << p2);
  CHECK(std::abs(f1 - p1) < 0.05);
  CHECK(std::abs(f2 - p2) < 0.05);
  CHECK(part.weight.size() == thin.size());
  CHECK(part.weight.front() == Approx(0.0).margin(1e-12));
  CHECK(part.weight.back() == Approx(1.0).margin(1e-12));
}

TEST_CASE("fit_series: de-standardized reconstruction matches the input", "[fit]") {
  auto y = simulate_mixture(make_mixture(0.65, 0.8, 300), 5400);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.2 * y[i] + 14.0 + 0.002 * static_cast<double>(i);
  auto opt = quick_options(2);
  opt.trend = true;
  opt.trend_draws = 50;
  const auto rep = fit_series(regular_series(y), opt);
  INFO("rms " << rep.reconstruction_rms);
  CHECK(rep.reconstruction_rms <= 1e-6);
  REQUIRE(rep.trend.has_value());
  CHECK(rep.trend->mean.size() == 300);
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK(rep.trend->lo[i] <= rep.trend->mean[i]);
    CHECK(rep.trend->mean[i] <= rep.trend->hi[i]);
  }
  // trend + mixture add back up to the fitted predictor
  double gap = 0.0;
  for (std::size_t i = 0; i < 300; ++i) gap = std::max(gap, std::abs(rep.fitted[i] - y[i]));
  CHECK(gap < 1e-5);
}

TEST_CASE("fit_series: report contents and input checks", "[fit]") {
  const auto y = simulate_mixture(make_mixture(0.6, 0.8, 150), 5500);
  const auto rep = fit_series(regular_series(y), quick_options(3));
  CHECK(rep.n == 150);
  CHECK(rep.regular);
  CHECK(rep.hurst_curve.size() == 150);
  const auto [h1, h2] = posterior_mean_hurst(rep.posterior);
  CHECK(rep.hurst_curve.front() == Approx(h1).margin(1e-9));
  CHECK(rep.hurst_curve.back() == Approx(h2).margin(1e-9));
  CHECK(rep.increase.p >= 0.0);
  CHECK(rep.increase.p <= 1.0);
  const bool short_warning = std::any_of(rep.warnings.begin(), rep.warnings.end(),
                                         [](const std::string& w) { return w.find("shorter than 200") != std::string::npos; });
  CHECK(short_warning);
  CHECK_FALSE(rep.marginals.empty());

  CHECK_THROWS_AS(fit_series(regular_series(std::vector<double>(40, 0.0)), quick_options(1)), ArgumentError);
  auto bad = regular_series(y);
  bad.timestamps[10] = bad.timestamps[9];
  CHECK_THROWS_AS(fit_series(bad, quick_options(1)), IngestionError);
}

TEST_CASE("time-varying sd: late-sample spread exceeds early-sample spread", "[fit]") {
  int later = 0;
  double early_acc = 0.0, late_acc = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto y = simulate_mixture(make_mixture(0.6, 0.8, 1000, 1.0, 3.0), derive_seed(5600, r));
    const auto e = mean_sd(std::span<const double>(y.data(), 200));
    const auto l = mean_sd(std::span<const double>(y.data() + 800, 200));
    later += l.sd > e.sd ? 1 : 0;
    early_acc += e.sd;
    late_acc += l.sd;
  }
  INFO("later in " << later << " of 100");
  CHECK(late_acc > early_acc);
  CHECK(later >= 95);
}

TEST_CASE("DFA on a long-memory series resembling the AMV record", "[fit]") {
  // annual-resolution record of roughly a millennium with H near 0.78
  double acc = 0.0;
  for (int r = 0; r < 20; ++r) acc += dfa_hurst(simulate_fgn(HurstExponent(0.78), 1000, derive_seed(5700, r)).values);
  INFO("mean DFA " << acc / 20);
  CHECK(acc / 20 == Approx(0.78).margin(0.05));
}
