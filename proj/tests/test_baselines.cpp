#include "catch_amalgamated.hpp"

#include <random>

#include "oracles.hpp"
#include "tvfgn/baselines.hpp"

using namespace tvfgn;
using Catch::Approx;

TEST_CASE("window_hurst: window count, centres and validation", "[baselines]") {
  const auto y = simulate_fgn(HurstExponent(0.7), 300, 1).values;
  const auto est = window_hurst(y, 60);
  CHECK(est.w == 60);
  CHECK(est.windows() == 240);
  CHECK(est.gaps() == 0);
  CHECK(est.centres.front() == Approx(29.5));
  CHECK(est.centres.back() == Approx(239 + 29.5));
  for (const auto& e : est.estimates) {
    REQUIRE(e.has_value());
    CHECK(*e >= HurstExponent::kMin);
    CHECK(*e <= HurstExponent::kMax);
  }
  CHECK_THROWS_AS(window_hurst(y, 9), ArgumentError);
  CHECK_THROWS_AS(window_hurst(y, 300), ArgumentError);
}

TEST_CASE("window_hurst: constant windows are skipped as gaps", "[baselines]") {
  auto y = simulate_fgn(HurstExponent(0.7), 200, 2).values;
  for (int i = 50; i < 120; ++i) y[i] = 1.25;
  const auto est = window_hurst(y, 40);
  // windows starting at 50..80 lie inside the constant stretch
  CHECK(est.gaps() == 31);
  for (int s = 50; s <= 80; ++s) CHECK_FALSE(est.estimates[s].has_value());
  CHECK(est.valid_estimates().size() == est.windows() - 31);
}

TEST_CASE("window_hurst: window profile MLE maximizes the fGn likelihood", "[baselines][oracle]") {
  const auto y = simulate_fgn(HurstExponent(0.8), 120, 3).values;
  const auto est = window_hurst(y, 100);
  const std::span<const double> seg(y.data() + 7, 100);
  std::vector<double> c(seg.begin(), seg.end());
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= 100.0;
  for (double& v : c) v -= mean;
  // dense profile likelihood over a fine H grid
  auto profile = [&](double h) {
    const Eigen::MatrixXd s = oracle::fgn_covariance(h, 100);
    const Eigen::Map<const Eigen::VectorXd> x(c.data(), 100);
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    const double q = x.dot(llt.solve(x));
    const double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * ld - 50.0 * std::log(q / 100.0);
  };
  double best_h = 0.5, best = -1e300;
  for (double h = 0.5; h <= 0.99 + 1e-12; h += 0.0005)
    if (const double v = profile(h); v > best) {
      best = v;
      best_h = h;
    }
  CHECK(*est.estimates[7] == Approx(best_h).margin(2e-3));
}

TEST_CASE("window_hurst: persistent fGn estimated near H=0.9", "[baselines][slow]") {
  double acc = 0.0;
  for (int r = 0; r < 20; ++r) {
    const auto y = simulate_fgn(HurstExponent(0.9), 2000, 7100 + r).values;
    const auto v = window_hurst(y, 500).valid_estimates();
    acc += std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  }
  INFO("mean window estimate " << acc / 20);
  CHECK(acc / 20 == Approx(0.9).margin(0.05));
}

TEST_CASE("window_hurst: white noise piles up at the lower bound", "[baselines]") {
  const auto y = simulate_fgn(HurstExponent(0.5), 1000, 8).values;
  const auto v = window_hurst(y, 200).valid_estimates();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const auto near = std::count_if(v.begin(), v.end(), [](double h) { return h < 0.52; });
  INFO("mean " << mean << ", fraction below 0.52 " << static_cast<double>(near) / v.size());
  CHECK(mean < 0.56);
  CHECK(static_cast<double>(near) / static_cast<double>(v.size()) > 0.3);
}

TEST_CASE("window_hurst: mixture estimates trend upward", "[baselines][slow]") {
  const auto spec = make_mixture(0.6, 0.9, 1000);
  int positive = 0;
  for (int r = 0; r < 100; ++r) {
    const auto y = simulate_mixture(spec, 7300 + r);
    const auto est = window_hurst(y, 250);
    std::vector<double> x, h;
    for (std::size_t i = 0; i < est.windows(); ++i)
      if (est.estimates[i]) {
        x.push_back(est.centres[i]);
        h.push_back(*est.estimates[i]);
      }
    positive += oracle::ols_slope(x, h) > 0.0 ? 1 : 0;
  }
  CHECK(positive >= 95);
}

TEST_CASE("kendall_tau: examples and errors", "[baselines]") {
  CHECK(kendall_tau(std::vector<double>{1, 2, 3, 4, 5}) == 1.0);
  CHECK(kendall_tau(std::vector<double>{5, 4, 3, 2, 1}) == -1.0);
  CHECK(kendall_tau(std::vector<double>{1, 3, 2}) == Approx(1.0 / 3.0).epsilon(1e-15));
  // ties count as neither; the denominator stays C(p, 2)
  CHECK(kendall_tau(std::vector<double>{1, 1, 2}) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(kendall_tau(std::vector<double>{4, 4, 4}) == 0.0);
  CHECK_THROWS_AS(kendall_tau(std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("kendall_tau: brute-force oracle and monotone invariance", "[baselines][oracle]") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> ui(0, 20), un(2, 150);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    const int p = un(rng);
    std::vector<double> x(p);
    for (auto& v : x) v = rep % 2 ? ui(rng) : z(rng);
    const double t = kendall_tau(x);
    CHECK(t == Approx(oracle::kendall_brute(x)).margin(1e-15));
    std::vector<double> a(x), b(x), c(x);
    for (auto& v : a) v = std::exp(v / 5.0);
    for (auto& v : b) v = v * v * v;
    for (auto& v : c) v = 3.0 * v - 7.0;
    CHECK(kendall_tau(a) == t);
    CHECK(kendall_tau(b) == t);
    CHECK(kendall_tau(c) == t);
    CHECK(t >= -1.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("tau_K under stationarity: centred null and median near zero", "[baselines]") {
  double acc = 0.0;
  std::vector<double> taus;
  for (int r = 0; r < 500; ++r) {
    const auto y = simulate_fgn(HurstExponent(0.75), 200, derive_seed(4242, r)).values;
    taus.push_back(kendall_tau(window_hurst(y, 50)));
    acc += taus.back();
  }
  INFO("mean tau " << acc / 500);
  CHECK(acc / 500 == Approx(0.0).margin(0.05));
  CHECK(tau_null_quantile(200, 50, HurstExponent(0.75), 0.5, 500, 9) == Approx(0.0).margin(0.05));
  CHECK_THROWS_AS(tau_null_quantile(200, 50, HurstExponent(0.75), 0.95, 499, 9), ArgumentError);
  CHECK_THROWS_AS(tau_null_quantile(200, 50, HurstExponent(0.75), 1.0, 500, 9), ArgumentError);
}

TEST_CASE("tau_null_quantile: 95% point at n=200", "[baselines][slow]") {
  // the 95% point sits in a long tail: with 1000 replicates its Monte Carlo
  // sd is about 0.017; 20000 bring it to about 0.004
  const double q = tau_null_quantile(200, 50, HurstExponent(0.75), 0.95, 20000, 2024);
  INFO("q95 " << q);
  CHECK(q == Approx(0.52).margin(0.03));
  CHECK(tau_null_quantile(200, 50, HurstExponent(0.75), 0.95, 600, 2024, 2) == tau_null_quantile(200, 50, HurstExponent(0.75), 0.95, 600, 2024, 1));
}

TEST_CASE("dfa_hurst: white noise and fGn", "[baselines]") {
  double wn = 0.0, f8 = 0.0;
  for (int r = 0; r < 10; ++r) {
    wn += dfa_hurst(simulate_fgn(HurstExponent(0.5), 10000, 8100 + r).values);
    f8 += dfa_hurst(simulate_fgn(HurstExponent(0.8), 10000, 8200 + r).values);
  }
  INFO("white " << wn / 10 << " H=0.8 " << f8 / 10);
  CHECK(wn / 10 == Approx(0.5).margin(0.05));
  CHECK(f8 / 10 == Approx(0.8).margin(0.05));
  // a single series as well
  CHECK(dfa_hurst(simulate_fgn(HurstExponent(0.8), 10000, 1).values) == Approx(0.8).margin(0.05));
}

TEST_CASE("dfa_hurst: ramp saturates, scale and shift invariance, errors", "[baselines]") {
  std::vector<double> ramp(2000);
  for (int i = 0; i < 2000; ++i) ramp[i] = 0.01 * i;
  CHECK(dfa_hurst(ramp) >= 1.5);

  const auto y = simulate_fgn(HurstExponent(0.7), 3000, 5).values;
  std::vector<double> ys(y);
  for (double& v : ys) v = 42.0 * v - 1000.0;
  CHECK(dfa_hurst(ys) == Approx(dfa_hurst(y)).epsilon(1e-9));

  const auto r = dfa(y);
  CHECK(r.scales.size() >= 4);
  CHECK(r.scales.front() == 10);
  CHECK(r.scales.back() == 300);
  for (std::size_t i = 1; i < r.scales.size(); ++i) CHECK(r.scales[i] > r.scales[i - 1]);

  CHECK_THROWS_AS(dfa_hurst(std::vector<double>(199, 1.0)), ArgumentError);
  DfaOptions narrow;
  narrow.min_scale = 100;
  narrow.max_scale = 102;
  CHECK_THROWS_AS(dfa_hurst(y, narrow), ArgumentError);
}
