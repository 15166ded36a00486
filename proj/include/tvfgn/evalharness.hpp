#pragma once

// Simulation studies: estimation accuracy for fixed (H1, H2) combinations and
// the random-(H1, H2) classification experiment comparing P(H2 > H1 | y)
// with Kendall's tau of sliding-window Hurst estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tvfgn/baselines.hpp"
#include "tvfgn/error.hpp"
#include "tvfgn/inference.hpp"
#include "tvfgn/lgm.hpp"
#include "tvfgn/mixture.hpp"
#include "tvfgn/parallel.hpp"
#include "tvfgn/stats.hpp"

namespace tvfgn {

struct HurstPair {
  double h1 = 0.5;
  double h2 = 0.5;
};

struct ExperimentConfig {
  std::vector<int> lengths{200, 500, 1000};
  std::vector<HurstPair> combinations;  ///< estimation study
  int replicates = 50;
  std::uint64_t seed = 1;
  double alpha = 0.05;            ///< p-hat threshold is 1 - alpha; tau_K threshold is the 1 - alpha null quantile
  double window_fraction = 0.25;  ///< baseline window w = floor(n * fraction)
  double null_h0 = 0.75;
  int null_replicates = 1000;
  std::map<int, double> null_quantiles;  ///< precomputed tau_K thresholds by n (skips the Monte Carlo)
  std::size_t probability_draws = 100000;
  bool standardize = true;
  int m = 4;
  PriorConfig priors;
  ExplorationConfig exploration;
  unsigned threads = 1;

  void validate() const {
    if (lengths.empty()) throw ArgumentError("experiment: no series lengths");
    for (int n : lengths)
      if (n < 40) throw ArgumentError("experiment: series length must be at least 40");
    if (replicates < 1) throw ArgumentError("experiment: replicates must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("experiment: alpha must lie in (0,1)");
    if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw ArgumentError("experiment: window fraction must lie in (0,1)");
    for (const auto& c : combinations) {
      HurstExponent(c.h1);
      HurstExponent(c.h2);
    }
  }
  [[nodiscard]] int window(int n) const { return static_cast<int>(std::floor(n * window_fraction)); }
};

struct ReplicateRecord {
  int n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  double post_h1 = 0.0;
  double post_h2 = 0.0;
  double phat = 0.0;
  double tau_k = 0.0;
  bool ok = false;
  std::string error;
};

struct EstimationRow {
  int n = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  int completed = 0;
  int failed = 0;
  double mean_h1 = 0.0;
  double mean_h2 = 0.0;
  double rmse1 = 0.0;
  double rmse2 = 0.0;
  double proportion = 0.0;  ///< fraction of replicates with post_h2 > post_h1
  double mean_phat = 0.0;
};

struct EstimationReport {
  std::vector<EstimationRow> rows;
  std::vector<ReplicateRecord> records;
};

struct ConfusionMetrics {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0.0, fpr = 0.0, ppv = 0.0, npv = 0.0;
};

struct RocCurve {
  std::vector<double> threshold;  ///< first point uses +inf
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

struct MethodReport {
  std::string name;
  double threshold = 0.0;
  ConfusionMetrics metrics;
  RocCurve roc;
};

struct ClassificationResult {
  int n = 0;
  int w = 0;
  double null_quantile = 0.0;
  int failed = 0;
  MethodReport phat;
  MethodReport tau;
  std::vector<ReplicateRecord> records;
};

struct ClassificationReport {
  std::vector<ClassificationResult> results;
};

/// Threshold sweep over the distinct scores (descending); equal scores form
/// one step. AUC by the trapezoid rule, which equals the Mann-Whitney
/// statistic with ties counted one half.
inline RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw ArgumentError("roc_curve: scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw ArgumentError("roc_curve: both classes must be present");
  for (double s : scores)
    if (std::isnan(s)) throw ArgumentError("roc_curve: NaN score");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve out;
  out.threshold.push_back(std::numeric_limits<double>::infinity());
  out.fpr.push_back(0.0);
  out.tpr.push_back(0.0);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == s; ++j) (labels[order[j]] ? tp : fp) += 1;
    const double x = static_cast<double>(fp) / static_cast<double>(neg);
    const double y = static_cast<double>(tp) / static_cast<double>(pos);
    out.auc += 0.5 * (x - out.fpr.back()) * (y + out.tpr.back());
    out.threshold.push_back(s);
    out.fpr.push_back(x);
    out.tpr.push_back(y);
    i = j;
  }
  return out;
}

inline ConfusionMetrics confusion(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) throw ArgumentError("confusion: size mismatch");
  ConfusionMetrics c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) (predicted[i] ? c.tp : c.fn) += 1;
    else (predicted[i] ? c.fp : c.tn) += 1;
  }
  auto ratio = [](int a, int b) { return a + b > 0 ? static_cast<double>(a) / (a + b) : std::numeric_limits<double>::quiet_NaN(); };
  c.tpr = ratio(c.tp, c.fn);
  c.fpr = ratio(c.fp, c.tn);
  c.ppv = ratio(c.tp, c.fp);
  c.npv = ratio(c.tn, c.fn);
  return c;
}

namespace detail {

inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t study, int n, std::size_t combo, int rep) {
  return derive_seed(derive_seed(derive_seed(derive_seed(master, study), static_cast<std::uint64_t>(n)), combo),
                     static_cast<std::uint64_t>(rep));
}

inline constexpr std::uint64_t kEstimationStudy = 1;
inline constexpr std::uint64_t kClassificationStudy = 2;
inline constexpr std::uint64_t kNullStudy = 3;

inline std::vector<double> simulate_replicate(const ExperimentConfig& cfg, const ReplicateRecord& rec) {
  return simulate_mixture(make_mixture(rec.h1, rec.h2, static_cast<std::size_t>(rec.n), 1.0, std::nullopt, cfg.m), rec.seed);
}

/// Fits one simulated series (standardized first unless disabled); the
/// posterior sampler is seeded from a child of the replicate seed.
inline void fit_replicate(const LatentModel& model, const ExperimentConfig& cfg, std::span<const double> series, ReplicateRecord& rec) {
  try {
    std::vector<double> y(series.begin(), series.end());
    if (cfg.standardize) y = standardize(y);
    auto exploration = cfg.exploration;
    exploration.threads = 1;
    const auto post = explore_posterior(model, y, cfg.priors, exploration);
    const auto [m1, m2] = posterior_mean_hurst(post);
    rec.post_h1 = m1;
    rec.post_h2 = m2;
    rec.phat = prob_increase(post, cfg.probability_draws, derive_seed(rec.seed, 7), 1).p;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
}

inline std::map<int, std::unique_ptr<LatentModel>> models_for(const ExperimentConfig& cfg) {
  std::map<int, std::unique_ptr<LatentModel>> out;
  for (int n : cfg.lengths)
    if (!out.count(n)) out[n] = std::make_unique<LatentModel>(mixture_only_spec(static_cast<std::size_t>(n), cfg.m));
  return out;
}

}  // namespace detail

/// Table-1-style study: for each length and (H1, H2) combination, posterior
/// means, frequentist RMSE and the fraction of replicates with H2-hat > H1-hat.
inline EstimationReport run_estimation_study(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.combinations.empty()) throw ArgumentError("run_estimation_study: no (H1,H2) combinations");
  const auto models = detail::models_for(cfg);
  EstimationReport rep;
  for (int n : cfg.lengths)
    for (std::size_t c = 0; c < cfg.combinations.size(); ++c)
      for (int r = 0; r < cfg.replicates; ++r) {
        ReplicateRecord rec;
        rec.n = n;
        rec.replicate = r;
        rec.h1 = cfg.combinations[c].h1;
        rec.h2 = cfg.combinations[c].h2;
        rec.seed = detail::replicate_seed(cfg.seed, detail::kEstimationStudy, n, c, r);
        rep.records.push_back(rec);
      }
  parallel_for(rep.records.size(), cfg.threads,
               [&](std::size_t i) {
                 auto& rec = rep.records[i];
                 detail::fit_replicate(*models.at(rec.n), cfg, detail::simulate_replicate(cfg, rec), rec);
               });

  std::size_t k = 0;
  for (int n : cfg.lengths)
    for (const auto& combo : cfg.combinations) {
      EstimationRow row;
      row.n = n;
      row.h1 = combo.h1;
      row.h2 = combo.h2;
      double s1 = 0, s2 = 0, e1 = 0, e2 = 0, inc = 0, ph = 0;
      for (int r = 0; r < cfg.replicates; ++r, ++k) {
        const auto& rec = rep.records[k];
        if (!rec.ok) {
          ++row.failed;
          continue;
        }
        ++row.completed;
        s1 += rec.post_h1;
        s2 += rec.post_h2;
        e1 += (rec.post_h1 - combo.h1) * (rec.post_h1 - combo.h1);
        e2 += (rec.post_h2 - combo.h2) * (rec.post_h2 - combo.h2);
        inc += rec.post_h2 > rec.post_h1 ? 1.0 : 0.0;
        ph += rec.phat;
      }
      if (row.completed > 0) {
        const double c = row.completed;
        row.mean_h1 = s1 / c;
        row.mean_h2 = s2 / c;
        row.rmse1 = std::sqrt(e1 / c);
        row.rmse2 = std::sqrt(e2 / c);
        row.proportion = inc / c;
        row.mean_phat = ph / c;
      } else {
        row.mean_h1 = row.mean_h2 = row.rmse1 = row.rmse2 = row.proportion = row.mean_phat =
            std::numeric_limits<double>::quiet_NaN();
      }
      rep.rows.push_back(row);
    }
  return rep;
}

/// Random-(H1, H2) classification study. H1 and H2 are drawn independently
/// and uniformly on (0.50, 0.99); a replicate is positive when H2 > H1.
inline ClassificationReport run_classification_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto models = detail::models_for(cfg);
  ClassificationReport report;
  for (int n : cfg.lengths) {
    ClassificationResult res;
    res.n = n;
    res.w = cfg.window(n);
    auto it = cfg.null_quantiles.find(n);
    res.null_quantile = it != cfg.null_quantiles.end()
                            ? it->second
                            : tau_null_quantile(n, res.w, HurstExponent(cfg.null_h0), 1.0 - cfg.alpha, cfg.null_replicates,
                                                derive_seed(derive_seed(cfg.seed, detail::kNullStudy), static_cast<std::uint64_t>(n)),
                                                cfg.threads);
    res.records.resize(static_cast<std::size_t>(cfg.replicates));
    for (int r = 0; r < cfg.replicates; ++r) {
      auto& rec = res.records[r];
      rec.n = n;
      rec.replicate = r;
      rec.seed = detail::replicate_seed(cfg.seed, detail::kClassificationStudy, n, 0, r);
      std::mt19937_64 rng(derive_seed(rec.seed, 11));
      std::uniform_real_distribution<double> u(HurstExponent::kMin, HurstExponent::kMax);
      rec.h1 = u(rng);
      rec.h2 = u(rng);
    }
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads == 0 ? default_thread_count() : cfg.threads,
                                                             static_cast<unsigned>(cfg.replicates)));
    std::vector<detail::InnovationCache> caches(
        workers, detail::InnovationCache(static_cast<std::size_t>(res.w), detail::InnovationCache::kDefaultBytes / workers));
    parallel_for(workers, workers, [&](std::size_t lane) {
      for (std::size_t r = lane; r < res.records.size(); r += workers) {
        auto& rec = res.records[r];
        const auto y = detail::simulate_replicate(cfg, rec);
        detail::fit_replicate(*models.at(n), cfg, y, rec);
        if (!rec.ok) continue;
        try {
          rec.tau_k = kendall_tau(window_hurst(y, res.w, &caches[lane]));
        } catch (const std::exception& e) {
          rec.ok = false;
          rec.error = e.what();
        }
      }
    });

    std::vector<double> sp, st;
    std::vector<bool> truth, pred_p, pred_t;
    for (const auto& rec : res.records) {
      if (!rec.ok) {
        ++res.failed;
        continue;
      }
      truth.push_back(rec.h2 > rec.h1);
      sp.push_back(rec.phat);
      st.push_back(rec.tau_k);
      pred_p.push_back(rec.phat > 1.0 - cfg.alpha);
      pred_t.push_back(rec.tau_k > res.null_quantile);
    }
    res.phat.name = "phat";
    res.phat.threshold = 1.0 - cfg.alpha;
    res.phat.metrics = confusion(pred_p, truth);
    res.tau.name = "kendall_tau";
    res.tau.threshold = res.null_quantile;
    res.tau.metrics = confusion(pred_t, truth);
    if (std::count(truth.begin(), truth.end(), true) > 0 && std::count(truth.begin(), truth.end(), false) > 0) {
      res.phat.roc = roc_curve(sp, truth);
      res.tau.roc = roc_curve(st, truth);
    } else {
      res.phat.roc.auc = res.tau.roc.auc = std::numeric_limits<double>::quiet_NaN();
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

namespace detail {

inline std::ostream& csv_number(std::ostream& os, double v) {
  if (std::isnan(v)) return os << "NA";
  if (std::isinf(v)) return os << (v > 0 ? "Inf" : "-Inf");
  return os << v;
}

class CsvPrecision {
 public:
  explicit CsvPrecision(std::ostream& os) : os_(os), flags_(os.flags()), prec_(os.precision()) {
    os_ << std::setprecision(10) << std::defaultfloat;
  }
  ~CsvPrecision() {
    os_.flags(flags_);
    os_.precision(prec_);
  }
  CsvPrecision(const CsvPrecision&) = delete;
  CsvPrecision& operator=(const CsvPrecision&) = delete;

 private:
  std::ostream& os_;
  std::ios::fmtflags flags_;
  std::streamsize prec_;
};

}  // namespace detail

inline void write_estimation_csv(std::ostream& os, const EstimationReport& rep) {
  detail::CsvPrecision guard(os);
  os << "n,H1,H2,completed,failed,mean_H1,mean_H2,rmse_H1,rmse_H2,proportion_H2_gt_H1,mean_phat\n";
  for (const auto& r : rep.rows) {
    os << r.n << ',' << r.h1 << ',' << r.h2 << ',' << r.completed << ',' << r.failed;
    for (double v : {r.mean_h1, r.mean_h2, r.rmse1, r.rmse2, r.proportion, r.mean_phat}) detail::csv_number(os << ',', v);
    os << '\n';
  }
}

inline void write_replicates_csv(std::ostream& os, const std::vector<ReplicateRecord>& recs) {
  detail::CsvPrecision guard(os);
  os << "n,replicate,seed,H1,H2,ok,post_H1,post_H2,phat,tau_k\n";
  for (const auto& r : recs) {
    os << r.n << ',' << r.replicate << ',' << r.seed << ',' << r.h1 << ',' << r.h2 << ',' << (r.ok ? 1 : 0);
    for (double v : {r.post_h1, r.post_h2, r.phat, r.tau_k}) detail::csv_number(os << ',', r.ok ? v : std::numeric_limits<double>::quiet_NaN());
    os << '\n';
  }
}

inline void write_classification_csv(std::ostream& os, const ClassificationReport& rep) {
  detail::CsvPrecision guard(os);
  os << "n,method,threshold,tp,fp,tn,fn,tpr,fpr,ppv,npv,auc,failed\n";
  for (const auto& res : rep.results)
    for (const MethodReport* m : {&res.phat, &res.tau}) {
      os << res.n << ',' << m->name << ',';
      detail::csv_number(os, m->threshold);
      os << ',' << m->metrics.tp << ',' << m->metrics.fp << ',' << m->metrics.tn << ',' << m->metrics.fn;
      for (double v : {m->metrics.tpr, m->metrics.fpr, m->metrics.ppv, m->metrics.npv, m->roc.auc}) detail::csv_number(os << ',', v);
      os << ',' << res.failed << '\n';
    }
}

inline void write_roc_csv(std::ostream& os, const ClassificationReport& rep) {
  detail::CsvPrecision guard(os);
  os << "n,method,threshold,fpr,tpr\n";
  for (const auto& res : rep.results)
    for (const MethodReport* m : {&res.phat, &res.tau})
      for (std::size_t i = 0; i < m->roc.fpr.size(); ++i) {
        os << res.n << ',' << m->name << ',';
        detail::csv_number(os, m->roc.threshold[i]);
        os << ',' << m->roc.fpr[i] << ',' << m->roc.tpr[i] << '\n';
      }
}

}  // namespace tvfgn
