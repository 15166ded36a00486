// tvfgn command-line tool: simulate, fit, map-kld, baseline, experiment,
// build-table.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "report_json.hpp"
#include "tvfgn/ar1_cascade.hpp"
#include "tvfgn/baselines.hpp"
#include "tvfgn/config.hpp"
#include "tvfgn/evalharness.hpp"
#include "tvfgn/fit.hpp"
#include "tvfgn/mixture.hpp"
#include "tvfgn/series.hpp"

namespace fs = std::filesystem;
using tvfgn::cli::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kInternal = 1, kArgument = 2, kIngestion = 3, kNumerical = 4 };

struct Global {
  unsigned threads = 1;
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

tvfgn::KeyValueConfig load_config(const Global& g) {
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv(tvfgn::kConfigEnvVar)) path = env;
  tvfgn::KeyValueConfig cfg;
  if (!path.empty()) cfg = tvfgn::KeyValueConfig::load_file(path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw tvfgn::ArgumentError("--set expects key=value, got '" + kv + "'");
    cfg.set(tvfgn::detail::trim(kv.substr(0, eq)), tvfgn::detail::trim(kv.substr(eq + 1)));
  }
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tvfgn::ArgumentError("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

/// Provenance block embedded in every output: verb, version and the resolved
/// settings that reproduce the file.
ordered_json provenance(const std::string& verb, const ordered_json& settings) {
  return {{"tool", "tvfgn"}, {"version", kVersion}, {"command", verb}, {"settings", settings}};
}

/// CSV files start with '#' lines carrying the same provenance (readers skip them).
void csv_provenance(std::ostream& os, const std::string& verb, const ordered_json& settings) {
  os << "# tvfgn " << kVersion << ' ' << verb << '\n';
  os << "# settings " << settings.dump() << '\n';
}

std::string sidecar_path(const std::string& out) { return out + ".json"; }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  double h1 = 0.6, h2 = 0.8, tau = 1.0;
  std::optional<double> beta;
  std::size_t n = 0;
  std::string times_file;
  int m = 4;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  std::vector<double> times;
  if (!a.times_file.empty()) {
    times = tvfgn::read_series_file(a.times_file).timestamps;
  } else {
    if (a.n < 2) throw tvfgn::ArgumentError("simulate: give --n (at least 2) or --times");
    times.resize(a.n);
    for (std::size_t i = 0; i < a.n; ++i) times[i] = static_cast<double>(i + 1);
  }
  tvfgn::MixtureSpec spec{tvfgn::HurstExponent(a.h1), tvfgn::HurstExponent(a.h2), a.tau, tvfgn::linear_weight(times), a.beta, a.m};
  spec.validate();
  const auto y = tvfgn::simulate_mixture(spec, a.seed);
  ordered_json settings{{"H1", a.h1}, {"H2", a.h2}, {"tau", a.tau}, {"beta", a.beta ? ordered_json(*a.beta) : ordered_json(nullptr)},
                        {"n", times.size()}, {"m", a.m}, {"seed", a.seed},
                        {"times_file", a.times_file.empty() ? ordered_json(nullptr) : ordered_json(a.times_file)}};
  if (a.out.empty() || a.out == "-") {
    csv_provenance(std::cout, "simulate", settings);
    tvfgn::write_series_csv(std::cout, times, y);
    return kOk;
  }
  {
    auto os = open_out(a.out);
    csv_provenance(os, "simulate", settings);
    tvfgn::write_series_csv(os, times, y);
  }
  write_json(sidecar_path(a.out), provenance("simulate", settings));
  return kOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string out_prefix;
  std::optional<bool> trend, beta, intercept;
  std::optional<std::uint64_t> seed;
};

int run_fit(const Global& g, const FitArgs& a) {
  auto cfg = load_config(g);
  if (a.trend) cfg.set("model.trend", *a.trend ? "true" : "false");
  if (a.beta) cfg.set("model.beta", *a.beta ? "true" : "false");
  if (a.intercept) cfg.set("model.intercept", *a.intercept ? "true" : "false");
  if (a.seed) cfg.set("seed", std::to_string(*a.seed));
  const auto opt = tvfgn::fit_options(cfg);
  cfg.require_all_used();
  const auto series = tvfgn::read_series_file(a.input);
  const auto rep = tvfgn::fit_series(series, opt, g.threads);

  const ordered_json settings{{"input", a.input}, {"config", tvfgn::cli::to_json(cfg)}, {"resolved", tvfgn::cli::to_json(opt)}};
  ordered_json report = provenance("fit", settings);
  report["result"] = tvfgn::cli::to_json(rep);
  const std::string prefix = a.out_prefix.empty() ? fs::path(a.input).replace_extension("").string() + "_fit" : a.out_prefix;
  write_json(prefix + ".json", report);
  {
    auto os = open_out(prefix + "_curves.csv");
    csv_provenance(os, "fit", settings);
    os << std::setprecision(12);
    os << "time,value,fitted,mixture,weight,hurst,trend_mean,trend_q025,trend_q975\n";
    for (std::size_t i = 0; i < rep.n; ++i) {
      os << rep.times[i] << ',' << series.values[i] << ',' << rep.fitted[i] << ',' << rep.mixture[i] << ',' << rep.weight[i] << ','
         << rep.hurst_curve[i];
      if (rep.trend) os << ',' << rep.trend->mean[i] << ',' << rep.trend->lo[i] << ',' << rep.trend->hi[i] << '\n';
      else os << ",NA,NA,NA\n";
    }
  }
  {
    auto os = open_out(prefix + "_marginals.csv");
    csv_provenance(os, "fit", settings);
    os << std::setprecision(12) << "parameter,x,density\n";
    for (const auto& m : rep.marginals)
      for (std::size_t k = 0; k < m.x.size(); ++k) os << m.name << ',' << m.x[k] << ',' << m.density[k] << '\n';
  }
  const auto& hy = report["result"]["hyperparameters"];
  std::cout << "n=" << rep.n << "  H1=" << hy["H1"]["mean"] << " (" << hy["H1"]["q025"] << ", " << hy["H1"]["q975"] << ")"
            << "  H2=" << hy["H2"]["mean"] << " (" << hy["H2"]["q025"] << ", " << hy["H2"]["q975"] << ")"
            << "  P(H2>H1)=" << rep.increase.p << '\n';
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << prefix << ".json, " << prefix << "_curves.csv, " << prefix << "_marginals.csv\n";
  return kOk;
}

// ----------------------------------------------------------------- map-kld

struct MapArgs {
  double h1 = 0.6, h2 = 0.8;
  std::size_t n = 512;
  int points = 21;
  std::string out;
};

int run_map_kld(const MapArgs& a) {
  if (a.points < 2) throw tvfgn::ArgumentError("map-kld: --points must be at least 2");
  std::vector<double> w(static_cast<std::size_t>(a.points));
  for (int k = 0; k < a.points; ++k) w[k] = static_cast<double>(k) / (a.points - 1);
  const auto h = tvfgn::kld_map_curve(w, tvfgn::HurstExponent(a.h1), tvfgn::HurstExponent(a.h2), a.n);
  double dev = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) dev = std::max(dev, std::abs(h[k] - (a.h1 + w[k] * (a.h2 - a.h1))));
  const ordered_json settings{{"H1", a.h1}, {"H2", a.h2}, {"n", a.n}, {"points", a.points}};
  auto emit = [&](std::ostream& os) {
    csv_provenance(os, "map-kld", settings);
    os << std::setprecision(12) << "w,H\n";
    for (std::size_t k = 0; k < w.size(); ++k) os << w[k] << ',' << h[k] << '\n';
  };
  if (a.out.empty() || a.out == "-") {
    emit(std::cout);
  } else {
    {
      auto os = open_out(a.out);
      emit(os);
    }
    auto j = provenance("map-kld", settings);
    j["max_deviation_from_line"] = dev;
    write_json(sidecar_path(a.out), j);
  }
  std::cerr << "max deviation from the straight line: " << dev << '\n';
  return kOk;
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
  std::string input;
  std::string out_prefix;
  int window = 0;
  int null_reps = 0;
  double h0 = 0.75;
  double level = 0.95;
  std::uint64_t seed = 1;
  int dfa_min = 10;
  int dfa_max = 0;
};

int run_baseline(const Global& g, const BaselineArgs& a) {
  const auto series = tvfgn::read_series_file(a.input);
  const int n = static_cast<int>(series.size());
  const int w = a.window > 0 ? a.window : tvfgn::default_window(n);
  const auto est = tvfgn::window_hurst(series.values, w);
  const double tau = tvfgn::kendall_tau(est);
  std::optional<double> q;
  if (a.null_reps > 0) q = tvfgn::tau_null_quantile(n, w, tvfgn::HurstExponent(a.h0), a.level, a.null_reps, a.seed, g.threads);
  std::optional<double> dfa;
  std::string dfa_error;
  try {
    tvfgn::DfaOptions d;
    d.min_scale = a.dfa_min;
    d.max_scale = a.dfa_max;
    dfa = tvfgn::dfa_hurst(series.values, d);
  } catch (const tvfgn::ArgumentError& e) {
    dfa_error = e.what();
  }
  const ordered_json settings{{"input", a.input}, {"window", w}, {"null_replicates", a.null_reps}, {"H0", a.h0},
                              {"level", a.level}, {"seed", a.seed}, {"dfa_min_scale", a.dfa_min}, {"dfa_max_scale", a.dfa_max}};
  auto j = provenance("baseline", settings);
  j["result"] = {{"n", n},
                 {"windows", est.windows()},
                 {"gaps", est.gaps()},
                 {"kendall_tau", tau},
                 {"null_quantile", q ? ordered_json(*q) : ordered_json(nullptr)},
                 {"tau_exceeds_null", q ? ordered_json(tau > *q) : ordered_json(nullptr)},
                 {"dfa_hurst", dfa ? ordered_json(*dfa) : ordered_json(nullptr)}};
  if (!dfa_error.empty()) j["result"]["dfa_error"] = dfa_error;
  const std::string prefix = a.out_prefix.empty() ? fs::path(a.input).replace_extension("").string() + "_baseline" : a.out_prefix;
  write_json(prefix + ".json", j);
  {
    auto os = open_out(prefix + "_windows.csv");
    csv_provenance(os, "baseline", settings);
    os << std::setprecision(12) << "centre_time,centre_index,hurst\n";
    for (std::size_t s = 0; s < est.windows(); ++s) {
      const double c = est.centres[s];
      const auto lo = static_cast<std::size_t>(std::floor(c));
      const auto hi = std::min(lo + 1, series.size() - 1);
      const double t = series.timestamps[lo] + (c - std::floor(c)) * (series.timestamps[hi] - series.timestamps[lo]);
      os << t << ',' << c << ',';
      if (est.estimates[s]) os << *est.estimates[s] << '\n';
      else os << "NA\n";
    }
  }
  std::cout << "tau_K=" << tau;
  if (q) std::cout << "  null(" << a.level << ")=" << *q;
  if (dfa) std::cout << "  DFA H=" << *dfa;
  std::cout << "\nwrote " << prefix << ".json, " << prefix << "_windows.csv\n";
  return kOk;
}

// -------------------------------------------------------------- experiment

int run_experiment(const Global& g, const std::string& out_dir) {
  auto cfg = load_config(g);
  auto plan = tvfgn::experiment_plan(cfg);
  cfg.require_all_used();
  plan.config.threads = g.threads;
  fs::create_directories(out_dir);
  const ordered_json settings{{"config", tvfgn::cli::to_json(cfg)}, {"resolved", tvfgn::cli::to_json(plan.config)}};
  {
    auto os = open_out((fs::path(out_dir) / "config.txt").string());
    cfg.write(os);
  }
  auto summary = provenance("experiment", settings);
  if (plan.study != tvfgn::StudyKind::Classification) {
    const auto rep = tvfgn::run_estimation_study(plan.config);
    auto os = open_out((fs::path(out_dir) / "estimation.csv").string());
    csv_provenance(os, "experiment", settings);
    tvfgn::write_estimation_csv(os, rep);
    auto rs = open_out((fs::path(out_dir) / "estimation_replicates.csv").string());
    csv_provenance(rs, "experiment", settings);
    tvfgn::write_replicates_csv(rs, rep.records);
    summary["estimation"] = tvfgn::cli::to_json(rep);
  }
  if (plan.study != tvfgn::StudyKind::Estimation) {
    const auto rep = tvfgn::run_classification_study(plan.config);
    auto os = open_out((fs::path(out_dir) / "classification.csv").string());
    csv_provenance(os, "experiment", settings);
    tvfgn::write_classification_csv(os, rep);
    auto roc = open_out((fs::path(out_dir) / "roc.csv").string());
    csv_provenance(roc, "experiment", settings);
    tvfgn::write_roc_csv(roc, rep);
    std::vector<tvfgn::ReplicateRecord> all;
    for (const auto& r : rep.results) all.insert(all.end(), r.records.begin(), r.records.end());
    auto rs = open_out((fs::path(out_dir) / "classification_replicates.csv").string());
    csv_provenance(rs, "experiment", settings);
    tvfgn::write_replicates_csv(rs, all);
    summary["classification"] = tvfgn::cli::to_json(rep);
  }
  write_json((fs::path(out_dir) / "summary.json").string(), summary);
  std::cout << "wrote results to " << out_dir << '\n';
  return kOk;
}

// ------------------------------------------------------------- build-table

std::string builtin_header(const tvfgn::CoefficientTable& t3, const tvfgn::CoefficientTable& t4) {
  std::ostringstream a, b, os;
  t3.save(a);
  t4.save(b);
  os << "#pragma once\n\n"
     << "// Generated by `tvfgn build-table --header`; refit with that verb rather than editing.\n\n"
     << "#include <string_view>\n\n"
     << "namespace tvfgn::detail {\n\n"
     << "inline constexpr std::string_view kBuiltinCascadeTableM3 = R\"TBL(\n"
     << a.str() << ")TBL\";\n\n"
     << "inline constexpr std::string_view kBuiltinCascadeTableM4 = R\"TBL(\n"
     << b.str() << ")TBL\";\n\n"
     << "}  // namespace tvfgn::detail\n";
  return os.str();
}

struct TableArgs {
  int m = 4;
  std::string out;
  std::string header;
  double power = tvfgn::kTableLagWeightPower;
};

int run_build_table(const TableArgs& a) {
  const tvfgn::optimize::NelderMeadOptions nm = tvfgn::CascadeFitOptions{}.optimizer;
  if (!a.header.empty()) {
    const auto t3 = tvfgn::build_table(3, nm, a.power);
    const auto t4 = tvfgn::build_table(4, nm, a.power);
    auto os = open_out(a.header);
    os << builtin_header(t3, t4);
    std::cout << "wrote " << a.header << '\n';
    return kOk;
  }
  const auto t = tvfgn::build_table(a.m, nm, a.power);
  if (a.out.empty() || a.out == "-") {
    t.save(std::cout);
  } else {
    t.save_file(a.out);
    std::cout << "wrote " << a.out << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying fractional Gaussian noise: simulation, Bayesian fitting and early-warning baselines"};
  app.set_version_flag("--version", std::string("tvfgn ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the verb
  Global g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--config", g.config_path, std::string("key = value config file (default: $") + tvfgn::kConfigEnvVar + ")");
  app.add_option("--set", g.overrides, "override a config key (key=value, repeatable)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate the time-varying mixture and write time,value CSV");
  s->add_option("--h1", sim.h1, "Hurst exponent at the start")->capture_default_str();
  s->add_option("--h2", sim.h2, "Hurst exponent at the end")->capture_default_str();
  s->add_option("--tau", sim.tau, "precision")->capture_default_str();
  s->add_option("--beta", sim.beta, "logistic variance-modulation parameter");
  s->add_option("--n", sim.n, "series length (unit-spaced times)");
  s->add_option("--times", sim.times_file, "CSV whose time column gives the observation times");
  s->add_option("--m", sim.m, "cascade size recorded in the spec")->capture_default_str();
  s->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  s->add_option("--out,-o", sim.out, "output CSV (default stdout); a .json sidecar is written next to it");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit the model to a time,value CSV");
  f->add_option("input", fit.input, "input CSV")->required();
  f->add_option("--out,-o", fit.out_prefix, "output prefix (default <input>_fit)");
  f->add_flag("--trend,!--no-trend", fit.trend, "include an rw2 trend");
  f->add_flag("--beta,!--no-beta", fit.beta, "estimate a time-varying standard deviation");
  f->add_flag("--intercept,!--no-intercept", fit.intercept, "include an intercept");
  f->add_option("--seed", fit.seed, "posterior sampling seed");

  MapArgs map;
  auto* k = app.add_subcommand("map-kld", "map mixture weights to KLD-equivalent Hurst exponents");
  k->add_option("--h1", map.h1)->capture_default_str();
  k->add_option("--h2", map.h2)->capture_default_str();
  k->add_option("--n", map.n, "reference length")->capture_default_str();
  k->add_option("--points", map.points, "number of weights on [0,1]")->capture_default_str();
  k->add_option("--out,-o", map.out, "output CSV (default stdout)");

  BaselineArgs base;
  auto* b = app.add_subcommand("baseline", "sliding-window Hurst, Kendall tau, null quantile and DFA");
  b->add_option("input", base.input, "input CSV")->required();
  b->add_option("--out,-o", base.out_prefix, "output prefix (default <input>_baseline)");
  b->add_option("--window", base.window, "window length (default n/4)");
  b->add_option("--null-reps", base.null_reps, "Monte Carlo replicates for the tau_K null quantile (0 = skip)")->capture_default_str();
  b->add_option("--h0", base.h0, "null Hurst exponent")->capture_default_str();
  b->add_option("--level", base.level, "null quantile level")->capture_default_str();
  b->add_option("--seed", base.seed)->capture_default_str();
  b->add_option("--dfa-min", base.dfa_min, "smallest DFA box")->capture_default_str();
  b->add_option("--dfa-max", base.dfa_max, "largest DFA box (0 = n/10)")->capture_default_str();

  std::string out_dir = "experiment_out";
  auto* e = app.add_subcommand("experiment", "run a simulation study described by the config file");
  e->add_option("--out-dir,-o", out_dir, "run directory")->capture_default_str();

  TableArgs table;
  auto* t = app.add_subcommand("build-table", "refit the AR(1) cascade coefficient table");
  t->add_option("--m", table.m, "cascade size (3 or 4)")->capture_default_str();
  t->add_option("--out,-o", table.out, "output table file (default stdout)");
  t->add_option("--header", table.header, "write both tables as the built-in C++ header instead");
  t->add_option("--lag-weight-power", table.power, "lag weights k^-power in the fit criterion")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kArgument;
  }

  try {
    (void)load_config(g);  // reject a malformed config or --set before any work
    if (*s) return run_simulate(sim);
    if (*f) return run_fit(g, fit);
    if (*k) return run_map_kld(map);
    if (*b) return run_baseline(g, base);
    if (*e) return run_experiment(g, out_dir);
    if (*t) return run_build_table(table);
  } catch (const tvfgn::IngestionError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kIngestion;
  } catch (const tvfgn::ArgumentError& err) {
    std::cerr << "argument error: " << err.what() << '\n';
    return kArgument;
  } catch (const tvfgn::NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return kNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
