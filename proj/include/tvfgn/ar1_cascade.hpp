#pragma once

// Markov approximation of fGn by a weighted sum of m independent AR(1)
// processes: coefficient fitting, tabulation over H, persistence and the
// block-diagonal precision of the stacked AR(1) components.

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/fgn.hpp"
#include "tvfgn/optimize.hpp"

namespace tvfgn {

/// Lag-one coefficients and weights of an AR(1) cascade. phi is strictly
/// increasing in (0,1); the weights sum to one so the cascade has unit
/// marginal variance.
struct CascadeCoefficients {
  std::vector<double> phi;
  std::vector<double> v;
  double objective = 0.0;  ///< (lag-weighted) sum of |cascade ACF - fGn ACF|

  [[nodiscard]] int m() const noexcept { return static_cast<int>(phi.size()); }

  [[nodiscard]] double acf(std::size_t lag) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) acc += v[j] * std::pow(phi[j], static_cast<double>(lag));
    return acc;
  }

  [[nodiscard]] std::vector<double> acf_vector(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < phi.size(); ++j) {
      double p = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        out[k] += v[j] * p;
        p *= phi[j];
      }
    }
    return out;
  }

  void validate() const {
    if (phi.size() != v.size() || phi.empty()) throw ArgumentError("cascade: phi and v must have equal nonzero length");
    double sum = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (!(phi[j] > 0.0 && phi[j] < 1.0)) throw ArgumentError("cascade: phi outside (0,1)");
      if (j > 0 && !(phi[j] > phi[j - 1])) throw ArgumentError("cascade: phi must be strictly increasing");
      if (!(v[j] >= 0.0)) throw ArgumentError("cascade: negative weight");
      sum += v[j];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ArgumentError("cascade: weights must sum to one");
  }
};

/// Largest |cascade ACF - fGn ACF| over lags 1..max_lag.
inline double cascade_max_acf_error(const CascadeCoefficients& c, double h, std::size_t max_lag) {
  const auto approx = c.acf_vector(max_lag + 1);
  double worst = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) worst = std::max(worst, std::abs(approx[k] - detail::fgn_acf_at(h, k)));
  return worst;
}

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline constexpr double kPhiFloor = 1e-4;
inline constexpr double kPhiCeiling = 1.0 - 1e-7;
inline constexpr double kStickFloor = 1e-9;

/// Unconstrained parametrization: phi by a stick-breaking map on
/// [kPhiFloor, kPhiCeiling] (guarantees strict ordering), v by a softmax with
/// the last logit pinned at zero.
inline CascadeCoefficients decode_cascade(const std::vector<double>& x, int m) {
  CascadeCoefficients c;
  c.phi.resize(m);
  c.v.resize(m);
  double prev = kPhiFloor;
  for (int j = 0; j < m; ++j) {
    const double frac = kStickFloor + (1.0 - 2.0 * kStickFloor) * logistic(x[j]);
    prev = prev + (kPhiCeiling - prev) * frac;
    c.phi[j] = prev;
  }
  double mx = 0.0;
  for (int j = 0; j < m - 1; ++j) mx = std::max(mx, x[m + j]);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const double b = j < m - 1 ? x[m + j] : 0.0;
    c.v[j] = std::exp(b - mx);
    total += c.v[j];
  }
  for (double& w : c.v) w /= total;
  return c;
}

inline std::vector<double> encode_cascade(const CascadeCoefficients& c) {
  const int m = c.m();
  std::vector<double> x(2 * m - 1);
  double prev = kPhiFloor;
  for (int j = 0; j < m; ++j) {
    double frac = std::clamp((c.phi[j] - prev) / (kPhiCeiling - prev), 2.0 * kStickFloor, 1.0 - 2.0 * kStickFloor);
    frac = (frac - kStickFloor) / (1.0 - 2.0 * kStickFloor);
    x[j] = logit(frac);
    prev = c.phi[j];
  }
  for (int j = 0; j < m - 1; ++j) x[m + j] = std::log(std::max(c.v[j], 1e-300) / std::max(c.v[m - 1], 1e-300));
  return x;
}

/// Lag weights k^{-power}; power 0 gives the plain L1 criterion.
inline std::vector<double> lag_weights(std::size_t lags, double power) {
  std::vector<double> w(lags, 1.0);
  if (power != 0.0)
    for (std::size_t k = 0; k < lags; ++k) w[k] = std::pow(static_cast<double>(k + 1), -power);
  return w;
}

inline double cascade_objective(const CascadeCoefficients& c, const std::vector<double>& target,
                                const std::vector<double>& weights) {
  // target[k-1] = rho_H(k)
  const std::size_t lags = target.size();
  double acc = 0.0;
  std::array<double, 8> pw{};
  const int m = c.m();
  for (int j = 0; j < m; ++j) pw[j] = 1.0;
  for (std::size_t k = 0; k < lags; ++k) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      pw[j] *= c.phi[j];
      s += c.v[j] * pw[j];
    }
    acc += weights[k] * std::abs(s - target[k]);
  }
  return acc;
}

/// Eight spread starting points: characteristic times exp(-1/T) on
/// geometric ladders with equal, decaying or growing weights.
inline std::vector<CascadeCoefficients> cascade_starts(int m) {
  struct Ladder {
    double lo, hi;
    int weights;  // 0 equal, 1 decaying, 2 growing
  };
  const std::array<Ladder, 8> ladders{{{0.5, 200.0, 0},
                                       {1.0, 1000.0, 1},
                                       {0.3, 50.0, 0},
                                       {2.0, 5000.0, 2},
                                       {0.5, 20000.0, 1},
                                       {1.0, 100.0, 2},
                                       {0.2, 2000.0, 0},
                                       {3.0, 300.0, 1}}};
  std::vector<CascadeCoefficients> out;
  for (const auto& l : ladders) {
    CascadeCoefficients c;
    c.phi.resize(m);
    c.v.resize(m);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t = l.lo * std::pow(l.hi / l.lo, static_cast<double>(j) / (m - 1));
      c.phi[j] = std::exp(-1.0 / t);
      c.v[j] = l.weights == 0 ? 1.0 : (l.weights == 1 ? std::pow(0.5, j) : std::pow(0.5, m - 1 - j));
      total += c.v[j];
    }
    for (double& w : c.v) w /= total;
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

struct CascadeFitOptions {
  optimize::NelderMeadOptions optimizer{20000, 0.5, 1e-12, 1e-10, 4};
  /// Extra starting point (previous grid knot) tried in addition to the
  /// eight built-in starts.
  const CascadeCoefficients* warm_start = nullptr;
  /// Absolute errors at lag k are weighted by k^{-lag_weight_power}.
  double lag_weight_power = 0.0;
};

/// Fits phi and v minimizing the summed absolute ACF error over lags
/// 1..max_lag (optionally lag-weighted) by multi-start Nelder-Mead.
inline CascadeCoefficients fit_cascade(HurstExponent h, int m, int max_lag, const CascadeFitOptions& opt = {}) {
  if (m != 3 && m != 4) throw ArgumentError("fit_cascade: m must be 3 or 4");
  if (max_lag < 100) throw ArgumentError("fit_cascade: max_lag must be at least 100");
  if (!(opt.lag_weight_power >= 0.0)) throw ArgumentError("fit_cascade: lag_weight_power must be nonnegative");
  const auto weights = detail::lag_weights(static_cast<std::size_t>(max_lag), opt.lag_weight_power);
  std::vector<double> target(max_lag);
  for (int k = 1; k <= max_lag; ++k) target[k - 1] = detail::fgn_acf_at(h.value(), k);

  auto objective = [&](const std::vector<double>& x) {
    const auto c = detail::decode_cascade(x, m);
    if (c.phi.back() >= 1.0) return std::numeric_limits<double>::infinity();
    return detail::cascade_objective(c, target, weights);
  };

  auto starts = detail::cascade_starts(m);
  if (opt.warm_start != nullptr && opt.warm_start->m() == m) starts.insert(starts.begin(), *opt.warm_start);

  optimize::VectorMinimum best;
  bool any_converged = false;
  for (const auto& s : starts) {
    auto r = optimize::nelder_mead(objective, detail::encode_cascade(s), opt.optimizer);
    any_converged = any_converged || r.converged;
    if (r.value < best.value) best = std::move(r);
  }
  if (!any_converged || !std::isfinite(best.value)) {
    std::ostringstream os;
    os << "fit_cascade: no start converged for H=" << h.value() << " m=" << m << "; best objective " << best.value;
    throw NumericalError(os.str());
  }
  auto c = detail::decode_cascade(best.x, m);
  c.objective = best.value;
  c.validate();
  return c;
}

/// Cascade coefficients tabulated on H = 0.50, 0.51, ..., 0.99 with
/// piecewise-linear interpolation between knots.
class CoefficientTable {
 public:
  static constexpr double kHMin = 0.50;
  static constexpr double kStep = 0.01;
  static constexpr int kKnots = 50;
  static constexpr int kMaxLag = 1000;
  static constexpr int kFormatVersion = 1;

  CoefficientTable() = default;
  CoefficientTable(int m, std::vector<CascadeCoefficients> knots) : m_(m), knots_(std::move(knots)) {
    if (static_cast<int>(knots_.size()) != kKnots) throw ArgumentError("CoefficientTable: expected 50 knots");
    for (const auto& k : knots_) {
      if (k.m() != m_) throw ArgumentError("CoefficientTable: knot has wrong cascade size");
      k.validate();
    }
  }

  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] const std::vector<CascadeCoefficients>& knots() const noexcept { return knots_; }
  [[nodiscard]] static double knot_h(int i) { return kHMin + kStep * i; }

  /// Coefficients at H. Exact knots return the stored entry; between knots
  /// phi and v are interpolated linearly and v is renormalized.
  [[nodiscard]] CascadeCoefficients lookup(double h) const {
    if (knots_.empty()) throw ArgumentError("CoefficientTable: empty table");
    if (!(h >= HurstExponent::kMin - 1e-12 && h <= HurstExponent::kMax + 1e-12))
      throw ArgumentError("CoefficientTable: H outside table range");
    const double pos = (h - kHMin) / kStep;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9) return knots_[static_cast<std::size_t>(std::clamp(nearest, 0.0, kKnots - 1.0))];
    const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, kKnots - 2);
    const double t = pos - lo;
    const auto& a = knots_[lo];
    const auto& b = knots_[lo + 1];
    CascadeCoefficients c;
    c.phi.resize(m_);
    c.v.resize(m_);
    double total = 0.0;
    for (int j = 0; j < m_; ++j) {
      c.phi[j] = (1.0 - t) * a.phi[j] + t * b.phi[j];
      c.v[j] = (1.0 - t) * a.v[j] + t * b.v[j];
      total += c.v[j];
    }
    for (double& w : c.v) w /= total;
    c.objective = (1.0 - t) * a.objective + t * b.objective;
    return c;
  }
  [[nodiscard]] CascadeCoefficients lookup(HurstExponent h) const { return lookup(h.value()); }

  void save(std::ostream& os) const {
    os << "# tvfgn AR(1) cascade coefficient table\n";
    os << "version " << kFormatVersion << "\n";
    os << "m " << m_ << "\n";
    os << std::setprecision(17);
    os << "h_min " << kHMin << "\n";
    os << "h_step " << kStep << "\n";
    os << "knots " << knots_.size() << "\n";
    os << "# H";
    for (int j = 1; j <= m_; ++j) os << " phi" << j;
    for (int j = 1; j <= m_; ++j) os << " v" << j;
    os << " objective\n";
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      os << knot_h(static_cast<int>(i));
      for (double p : knots_[i].phi) os << ' ' << p;
      for (double w : knots_[i].v) os << ' ' << w;
      os << ' ' << knots_[i].objective << '\n';
    }
  }

  static CoefficientTable load(std::istream& is) {
    std::string line;
    int version = -1, m = -1;
    std::size_t count = 0;
    std::vector<CascadeCoefficients> knots;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "version") {
        ls >> version;
      } else if (key == "m") {
        ls >> m;
      } else if (key == "h_min" || key == "h_step") {
        double v = 0.0;
        ls >> v;
        const double expect = key == "h_min" ? kHMin : kStep;
        if (std::abs(v - expect) > 1e-12) throw IngestionError("cascade table: unsupported grid");
      } else if (key == "knots") {
        ls >> count;
      } else {
        if (m <= 0) throw IngestionError("cascade table: row before header");
        ls.clear();
        ls.str(line);
        double h = 0.0;
        ls >> h;
        CascadeCoefficients c;
        c.phi.resize(m);
        c.v.resize(m);
        for (auto& p : c.phi) ls >> p;
        for (auto& w : c.v) ls >> w;
        ls >> c.objective;
        if (!ls) throw IngestionError("cascade table: malformed row '" + line + "'");
        if (std::abs(h - knot_h(static_cast<int>(knots.size()))) > 1e-9) throw IngestionError("cascade table: knots out of order");
        knots.push_back(std::move(c));
      }
    }
    if (version != kFormatVersion) throw IngestionError("cascade table: unsupported version");
    if (knots.size() != count) throw IngestionError("cascade table: knot count mismatch");
    try {
      return CoefficientTable(m, std::move(knots));
    } catch (const ArgumentError& e) {
      throw IngestionError(std::string("cascade table: ") + e.what());
    }
  }

  static CoefficientTable load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open cascade table " + path);
    return load(in);
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write cascade table " + path);
    save(out);
  }

  /// Tables shipped with the library (m = 3 or 4).
  static const CoefficientTable& builtin(int m);

 private:
  int m_ = 0;
  std::vector<CascadeCoefficients> knots_;
};

/// Fits every knot. Knots are fitted from H = 0.99 downwards, each seeded
/// with its upper neighbour, which keeps the coefficients continuous in H.
/// Lag-weight exponent used for the tabulated fits. Plain L1 over 1000 lags
/// lets the long tail dominate and leaves lag-one errors near 0.04 at high H,
/// which biases likelihood-based Hurst estimates downwards.
inline constexpr double kTableLagWeightPower = 1.0;

inline CoefficientTable build_table(int m, const optimize::NelderMeadOptions& nm = CascadeFitOptions{}.optimizer,
                                    double lag_weight_power = kTableLagWeightPower) {
  if (m != 3 && m != 4) throw ArgumentError("build_table: m must be 3 or 4");
  std::vector<CascadeCoefficients> knots(CoefficientTable::kKnots);
  const CascadeCoefficients* previous = nullptr;
  for (int i = CoefficientTable::kKnots - 1; i >= 0; --i) {
    CascadeFitOptions opt;
    opt.optimizer = nm;
    opt.warm_start = previous;
    opt.lag_weight_power = lag_weight_power;
    try {
      knots[i] = fit_cascade(HurstExponent(CoefficientTable::knot_h(i)), m, CoefficientTable::kMaxLag, opt);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("build_table: ") + e.what());
    }
    previous = &knots[i];
  }
  // At H = 0.5 every component but the first has zero weight, so its phi is
  // arbitrary; copy the neighbour's to keep interpolation on [0.50, 0.51]
  // continuous.
  auto& white = knots.front();
  const auto& next = knots[1];
  white.v.assign(static_cast<std::size_t>(m), 0.0);
  white.v[0] = 1.0;
  white.phi[0] = std::min(white.phi[0], 0.5 * next.phi[0]);
  for (int j = 1; j < m; ++j) white.phi[j] = next.phi[j];
  std::vector<double> white_target(CoefficientTable::kMaxLag);
  for (int k = 1; k <= CoefficientTable::kMaxLag; ++k) white_target[k - 1] = detail::fgn_acf_at(CoefficientTable::kHMin, k);
  white.objective =
      detail::cascade_objective(white, white_target, detail::lag_weights(white_target.size(), lag_weight_power));
  return CoefficientTable(m, std::move(knots));
}

/// Block-diagonal precision of m stacked unit-variance AR(1) processes.
struct Ar1BlockPrecision {
  Eigen::SparseMatrix<double> matrix;
  CascadeCoefficients coefficients;
  std::size_t n = 0;
};

namespace detail {

/// Appends the triplets of the stationary unit-variance AR(1) precision of
/// length n at offset `off`.
inline void append_ar1_precision(std::vector<Eigen::Triplet<double>>& out, std::size_t off, std::size_t n, double phi) {
  const double s = 1.0 / (1.0 - phi * phi);
  for (std::size_t t = 0; t < n; ++t) {
    const bool edge = (t == 0 || t + 1 == n);
    const auto i = static_cast<int>(off + t);
    out.emplace_back(i, i, s * (edge ? 1.0 : 1.0 + phi * phi));
    if (t + 1 < n) {
      out.emplace_back(i, i + 1, -s * phi);
      out.emplace_back(i + 1, i, -s * phi);
    }
  }
}

}  // namespace detail

inline Ar1BlockPrecision block_precision(const CascadeCoefficients& c, std::size_t n) {
  if (n < 2) throw ArgumentError("block_precision: n must be at least 2");
  c.validate();
  const std::size_t m = c.phi.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * 3 * n);
  for (std::size_t j = 0; j < m; ++j) detail::append_ar1_precision(trip, j * n, n, c.phi[j]);
  Ar1BlockPrecision out;
  out.matrix.resize(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(m * n));
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.coefficients = c;
  out.n = n;
  return out;
}

inline Ar1BlockPrecision block_precision(HurstExponent h, std::size_t n, const CoefficientTable& table) {
  return block_precision(table.lookup(h), n);
}

}  // namespace tvfgn

#include "tvfgn/detail/builtin_tables.hpp"

namespace tvfgn {

inline const CoefficientTable& CoefficientTable::builtin(int m) {
  if (m == 3) {
    static const CoefficientTable t3 = [] {
      std::istringstream in{std::string(detail::kBuiltinCascadeTableM3)};
      return load(in);
    }();
    return t3;
  }
  if (m == 4) {
    static const CoefficientTable t4 = [] {
      std::istringstream in{std::string(detail::kBuiltinCascadeTableM4)};
      return load(in);
    }();
    return t4;
  }
  throw ArgumentError("CoefficientTable::builtin: m must be 3 or 4");
}

}  // namespace tvfgn
