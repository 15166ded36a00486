#pragma once

// Plain-text key = value configuration ('#' starts a comment) and its
// translation into the library's option structs.

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tvfgn/error.hpp"
#include "tvfgn/evalharness.hpp"
#include "tvfgn/inference.hpp"
#include "tvfgn/series.hpp"

namespace tvfgn {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>") {
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
      ++row;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = detail::trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ArgumentError(source + ": line " + std::to_string(row) + ": expected key = value");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty()) throw ArgumentError(source + ": line " + std::to_string(row) + ": empty key");
      if (cfg.values_.count(key)) throw ArgumentError(source + ": line " + std::to_string(row) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
      cfg.order_.push_back(key);
    }
    return cfg;
  }

  static KeyValueConfig load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config " + path);
    return parse(in, path);
  }

  /// Later assignments override earlier ones (used for --set key=value).
  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }
  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<std::string>& keys_in_order() const noexcept { return order_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  [[nodiscard]] double get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto v = detail::parse_number(it->second);
    if (!v || std::isnan(*v)) throw ArgumentError(source_ + ": key '" + key + "': not a number: " + it->second);
    return *v;
  }

  [[nodiscard]] std::optional<double> get_optional_double(const std::string& key) const {
    if (!has(key)) {
      consumed_.insert(key);
      return std::nullopt;
    }
    return get_double(key, 0.0);
  }

  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw ArgumentError(source_ + ": key '" + key + "': not an integer");
    return static_cast<long long>(v);
  }

  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ArgumentError(source_ + ": key '" + key + "': not a boolean: " + v);
  }

  /// Comma-separated numbers.
  [[nodiscard]] std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream is(it->second);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto v = detail::parse_number(detail::trim(item));
      if (!v || std::isnan(*v)) throw ArgumentError(source_ + ": key '" + key + "': bad list entry '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }

  /// Keys present in the file that no getter asked for.
  [[nodiscard]] std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& k : order_)
      if (!consumed_.count(k)) out.push_back(k);
    return out;
  }

  void require_all_used() const {
    const auto unused = unused_keys();
    if (unused.empty()) return;
    std::string msg = source_ + ": unknown key(s):";
    for (const auto& k : unused) msg += " " + k;
    throw ArgumentError(msg);
  }

  void write(std::ostream& os) const {
    for (const auto& k : order_) os << k << " = " << values_.at(k) << '\n';
  }

 private:
  std::string source_ = "<config>";
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string> consumed_;
};

/// Environment variable naming the config file used when none is given.
inline constexpr const char* kConfigEnvVar = "TVFGN_CONFIG";

inline PriorConfig prior_config(const KeyValueConfig& c) {
  PriorConfig p;
  p.tau_u = c.get_double("prior.tau_u", p.tau_u);
  p.tau_alpha = c.get_double("prior.tau_alpha", p.tau_alpha);
  p.hurst_lambda = c.get_optional_double("prior.hurst_lambda");
  p.hurst_n_ref = static_cast<int>(c.get_int("prior.hurst_n_ref", p.hurst_n_ref));
  p.beta_scale = c.get_double("prior.beta_scale", p.beta_scale);
  p.trend_u = c.get_double("prior.trend_u", p.trend_u);
  p.trend_alpha = c.get_double("prior.trend_alpha", p.trend_alpha);
  return p;
}

inline Design parse_design(const std::string& s) {
  if (s == "auto") return Design::Automatic;
  if (s == "grid") return Design::Grid;
  if (s == "ccd") return Design::Ccd;
  throw ArgumentError("grid.design must be auto, grid or ccd (got '" + s + "')");
}

inline const char* design_name(Design d) {
  switch (d) {
    case Design::Automatic: return "auto";
    case Design::Grid: return "grid";
    case Design::Ccd: return "ccd";
  }
  return "auto";
}

inline ExplorationConfig exploration_config(const KeyValueConfig& c) {
  ExplorationConfig e;
  e.design = parse_design(c.get_string("grid.design", design_name(e.design)));
  e.grid_step = c.get_double("grid.step", e.grid_step);
  e.grid_drop = c.get_double("grid.drop", e.grid_drop);
  e.max_points = static_cast<std::size_t>(c.get_int("grid.max_points", static_cast<long long>(e.max_points)));
  e.ccd_cap_sd = c.get_double("grid.ccd_cap_sd", e.ccd_cap_sd);
  e.hessian_step = c.get_double("hessian.step", e.hessian_step);
  e.min_curvature = c.get_double("hessian.min_curvature", e.min_curvature);
  e.bfgs.max_iterations = static_cast<int>(c.get_int("optimizer.max_iterations", e.bfgs.max_iterations));
  e.bfgs.gradient_tolerance = c.get_double("optimizer.gradient_tolerance", e.bfgs.gradient_tolerance);
  e.bfgs.fd_step = c.get_double("optimizer.fd_step", e.bfgs.fd_step);
  return e;
}

/// Model and posterior-summary options of the fit verb.
struct FitOptions {
  bool trend = false;
  bool intercept = false;
  bool slope = false;
  bool time_varying_sd = false;
  int m = 4;
  std::optional<double> grid_step;  ///< latent grid spacing for irregular times
  std::size_t probability_draws = 100000;
  int trend_draws = 400;
  int curve_points = 200;
  std::uint64_t seed = 1;
  PriorConfig priors;
  ExplorationConfig exploration;
};

inline FitOptions fit_options(const KeyValueConfig& c) {
  FitOptions f;
  f.trend = c.get_bool("model.trend", f.trend);
  f.intercept = c.get_bool("model.intercept", f.intercept);
  f.slope = c.get_bool("model.slope", f.slope);
  f.time_varying_sd = c.get_bool("model.beta", f.time_varying_sd);
  f.m = static_cast<int>(c.get_int("model.m", f.m));
  f.grid_step = c.get_optional_double("model.grid_step");
  f.probability_draws = static_cast<std::size_t>(c.get_int("inference.draws", static_cast<long long>(f.probability_draws)));
  f.trend_draws = static_cast<int>(c.get_int("inference.trend_draws", f.trend_draws));
  f.curve_points = static_cast<int>(c.get_int("inference.curve_points", f.curve_points));
  f.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(f.seed)));
  f.priors = prior_config(c);
  f.exploration = exploration_config(c);
  return f;
}

enum class StudyKind { Estimation, Classification, Both };

struct ExperimentPlan {
  StudyKind study = StudyKind::Estimation;
  ExperimentConfig config;
};

/// "h1:h2, h1:h2, ..." pairs.
inline std::vector<HurstPair> parse_combinations(const std::string& text) {
  std::vector<HurstPair> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ArgumentError("experiment.combinations: expected H1:H2, got '" + item + "'");
    const auto a = detail::parse_number(detail::trim(item.substr(0, colon)));
    const auto b = detail::parse_number(detail::trim(item.substr(colon + 1)));
    if (!a || !b) throw ArgumentError("experiment.combinations: bad pair '" + item + "'");
    out.push_back({*a, *b});
  }
  return out;
}

inline ExperimentPlan experiment_plan(const KeyValueConfig& c) {
  ExperimentPlan plan;
  const std::string study = c.get_string("experiment.study", "estimation");
  if (study == "estimation") plan.study = StudyKind::Estimation;
  else if (study == "classification") plan.study = StudyKind::Classification;
  else if (study == "both") plan.study = StudyKind::Both;
  else throw ArgumentError("experiment.study must be estimation, classification or both");
  auto& e = plan.config;
  std::vector<double> lengths(e.lengths.begin(), e.lengths.end());
  lengths = c.get_list("experiment.lengths", lengths);
  e.lengths.clear();
  for (double v : lengths) {
    if (v != std::floor(v) || v < 1) throw ArgumentError("experiment.lengths must be positive integers");
    e.lengths.push_back(static_cast<int>(v));
  }
  e.combinations = parse_combinations(c.get_string("experiment.combinations", ""));
  e.replicates = static_cast<int>(c.get_int("experiment.replicates", e.replicates));
  e.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(e.seed)));
  e.alpha = c.get_double("alpha", e.alpha);
  e.window_fraction = c.get_double("baseline.window_fraction", e.window_fraction);
  e.null_h0 = c.get_double("baseline.null_h0", e.null_h0);
  e.null_replicates = static_cast<int>(c.get_int("baseline.null_replicates", e.null_replicates));
  for (int n : e.lengths) {
    const auto q = c.get_optional_double("baseline.null_quantile." + std::to_string(n));
    if (q) e.null_quantiles[n] = *q;
  }
  e.probability_draws = static_cast<std::size_t>(c.get_int("inference.draws", static_cast<long long>(e.probability_draws)));
  e.standardize = c.get_bool("experiment.standardize", e.standardize);
  e.m = static_cast<int>(c.get_int("model.m", e.m));
  e.priors = prior_config(c);
  e.exploration = exploration_config(c);
  e.validate();
  if (plan.study != StudyKind::Classification && e.combinations.empty())
    throw ArgumentError("experiment: estimation study needs experiment.combinations");
  return plan;
}

}  // namespace tvfgn
