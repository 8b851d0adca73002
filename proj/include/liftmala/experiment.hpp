#pragma once

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "liftmala/config.hpp"
#include "liftmala/diagnostics.hpp"
#include "liftmala/integrator.hpp"
#include "liftmala/sampler.hpp"
#include "liftmala/target.hpp"

namespace liftmala {

struct CsvRow {
  std::string experiment;
  std::string sampler;
  std::string kernel_or_integrator;
  double alpha = 0.0;
  double h = 0.0;
  std::string metric_name;
  double value = 0.0;
  double err = 0.0;
  long n_samples = 0;
  int n_replicates = 0;
  std::uint64_t seed = 0;
};

inline std::string csv_header() {
  return "experiment,sampler,kernel_or_integrator,alpha,h,metric_name,value,"
         "stderr_or_ci_halfwidth,n_samples,n_replicates,seed";
}

inline std::string format_csv_row(const CsvRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%s,%.12e,%.12e,%s,%.12e,%.12e,%ld,%d,%llu",
                r.experiment.c_str(), r.sampler.c_str(),
                r.kernel_or_integrator.c_str(), r.alpha, r.h,
                r.metric_name.c_str(), r.value, r.err, r.n_samples,
                r.n_replicates,
                static_cast<unsigned long long>(r.seed));
  return buf;
}

inline void sort_csv_rows(std::vector<CsvRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    return std::tie(a.sampler, a.kernel_or_integrator, a.h, a.metric_name) <
           std::tie(b.sampler, b.kernel_or_integrator, b.h, b.metric_name);
  });
}

inline std::string csv_to_string(const std::vector<CsvRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const CsvRow& r : rows) out += format_csv_row(r) + "\n";
  return out;
}

inline void write_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  file << csv_to_string(rows);
  if (!file) throw NumericalError("failed writing output file '" + path + "'");
}

/// 95% confidence interval for a ratio of two independent sample variances
/// with n1 - 1 and n2 - 1 degrees of freedom (F bounds).
inline std::pair<double, double> variance_ratio_ci95(double ratio, int n1,
                                                     int n2) {
  boost::math::fisher_f dist(static_cast<double>(n1 - 1),
                             static_cast<double>(n2 - 1));
  return {ratio / boost::math::quantile(dist, 0.975),
          ratio / boost::math::quantile(dist, 0.025)};
}

/// Builds the concrete sampler for one run of the experiment: gradient
/// truncation applies to the proposal machinery of the lifted samplers
/// (never to plain MALA), while integrators always see the exact gradient
/// so their shear structure is preserved.
inline SamplerSetup build_sampler_setup(const ExperimentConfig& cfg,
                                        const RunSpec& run) {
  Params params;
  if (cfg.target == "std_gaussian")
    params["dim"] = static_cast<double>(cfg.dim);
  const Target base = make_builtin_target(cfg.target, params);

  SamplerSetup setup;
  setup.sampler = run.sampler;
  setup.kernel = run.kernel;
  setup.picard = {cfg.picard_tol, cfg.picard_max_iter};
  setup.target = (cfg.truncation_radius > 0.0 && run.sampler != SamplerKind::mala)
                     ? truncate_gradient(base, cfg.truncation_radius)
                     : base;
  if (run.sampler != SamplerKind::mala)
    setup.drift = make_rotation_drift(cfg.alpha, base.dim);
  if (run.sampler == SamplerKind::ghmala) {
    if (run.integrator == "midpoint") {
      setup.integrator = midpoint_integrator(base, setup.drift);
    } else if (run.integrator == "conjugated_midpoint") {
      setup.integrator = conjugated_midpoint_integrator(
          base, setup.drift, make_shear_preset("warped_shear"));
    } else if (run.integrator == "explicit_splitting") {
      setup.integrator = explicit_splitting_integrator(base, setup.drift);
    } else {
      throw ConfigError("unknown integrator '" + run.integrator + "'");
    }
  }
  return setup;
}

namespace detail {

struct CellSummary {
  std::vector<double> estimates;          // per-replicate time averages
  std::vector<RateEstimate> rates;        // per-replicate primary rejection
  std::vector<RateEstimate> hybrid_rates; // per-replicate hybrid rejection
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_ci_halfwidth = 0.0;
};

inline RateEstimate pool_rates(const std::vector<RateEstimate>& rates) {
  if (rates.size() == 1) return rates.front();
  double mean = 0.0;
  for (const auto& r : rates) mean += r.rate;
  mean /= static_cast<double>(rates.size());
  double ss = 0.0;
  for (const auto& r : rates) ss += (r.rate - mean) * (r.rate - mean);
  const double n = static_cast<double>(rates.size());
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Runs every (sampler, h) cell of the experiment and emits one CSV row per
/// metric. Replicates within a cell may run on several threads; each writes
/// into its own slot, so the output bytes do not depend on the thread count.
inline std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg,
                                          int threads = 1,
                                          std::ostream* log = nullptr) {
  const Observable obs = make_observable(cfg.observable);
  const bool rejection_only = cfg.experiment.rfind("rejection", 0) == 0;
  const bool variance_preset = cfg.experiment.rfind("variance_", 0) == 0;
  const bool want_rejection = rejection_only || cfg.experiment == "custom";
  const bool want_variance =
      (variance_preset || cfg.experiment == "custom") && cfg.n_replicates >= 2;
  const bool want_mean = !rejection_only;

  std::vector<CsvRow> rows;
  // variance by (run label pair, h index) for the ratio rows
  std::map<std::pair<std::size_t, std::size_t>, double> cell_variance;

  for (std::size_t ri = 0; ri < cfg.runs.size(); ++ri) {
    const RunSpec& run = cfg.runs[ri];
    const SamplerSetup setup = build_sampler_setup(cfg, run);
    const StepFn step = make_stepper(setup);
    const std::uint64_t run_seed = derive_seed(cfg.master_seed, ri);

    for (std::size_t hi = 0; hi < cfg.h_grid.size(); ++hi) {
      const double h = cfg.h_grid[hi];
      const std::uint64_t cell_seed = derive_seed(run_seed, hi);
      const int reps = cfg.n_replicates;

      ChainConfig base;
      base.h = h;
      base.n_steps = cfg.n_samples + cfg.burn_in();
      base.burn_in = cfg.burn_in();
      base.initial_state = {Vec::Zero(setup.target.dim),
                            cfg.initial_direction};
      base.record_observable_trace = want_mean && reps == 1;

      std::vector<ChainResult> results(reps);
      parallel_for(reps, threads, [&](long i) {
        ChainConfig local = base;
        local.seed = derive_seed(cell_seed, static_cast<std::uint64_t>(i));
        results[i] = run_chain(step, local, &obs);
      });

      detail::CellSummary cell;
      for (const ChainResult& res : results) {
        cell.estimates.push_back(res.time_average);
        cell.rates.push_back(rejection_rate_from_trace(res.accept_trace));
        if (!res.hybrid_accept_trace.empty())
          cell.hybrid_rates.push_back(
              rejection_rate_from_trace(res.hybrid_accept_trace));
      }

      CsvRow proto;
      proto.experiment = cfg.experiment;
      proto.sampler = sampler_name(run.sampler);
      proto.kernel_or_integrator = run.label;
      proto.alpha = run.sampler == SamplerKind::mala ? 0.0 : cfg.alpha;
      proto.h = h;
      proto.n_samples = cfg.n_samples;
      proto.n_replicates = reps;
      proto.seed = cell_seed;

      if (want_rejection) {
        const RateEstimate primary = detail::pool_rates(cell.rates);
        CsvRow r = proto;
        if (run.sampler == SamplerKind::ghmala) {
          r.metric_name = "rejection_rate_mala_substep";
          r.value = primary.rate;
          r.err = primary.se;
          rows.push_back(r);
          const RateEstimate hybrid = detail::pool_rates(cell.hybrid_rates);
          r.metric_name = "rejection_rate_hybrid_substep";
          r.value = hybrid.rate;
          r.err = hybrid.se;
          rows.push_back(r);
        } else {
          r.metric_name = "rejection_rate";
          r.value = primary.rate;
          r.err = primary.se;
          rows.push_back(r);
        }
      }

      if (want_mean) {
        double mean = 0.0;
        for (double e : cell.estimates) mean += e;
        mean /= static_cast<double>(reps);
        double se = 0.0;
        if (reps >= 2) {
          double ss = 0.0;
          for (double e : cell.estimates) ss += (e - mean) * (e - mean);
          se = std::sqrt(ss / (reps - 1.0) / reps);
        } else {
          const auto& trace = results.front().observable_trace;
          double m2 = 0.0;
          for (double v : trace) m2 += (v - mean) * (v - mean);
          m2 /= static_cast<double>(trace.size());
          const double tau =
              m2 > 0.0 ? integrated_autocorrelation_time(trace) : 1.0;
          se = std::sqrt(m2 * tau / static_cast<double>(trace.size()));
        }
        CsvRow r = proto;
        r.metric_name = "mean_estimate";
        r.value = mean;
        r.err = se;
        rows.push_back(r);
      }

      if (want_variance) {
        double mean = 0.0;
        for (double e : cell.estimates) mean += e;
        mean /= static_cast<double>(reps);
        double ss = 0.0;
        for (double e : cell.estimates) ss += (e - mean) * (e - mean);
        const double variance = ss / (reps - 1.0);
        const auto ci = variance_ci95(variance, reps);
        CsvRow r = proto;
        r.metric_name = "variance";
        r.value = variance;
        r.err = 0.5 * (ci.second - ci.first);
        rows.push_back(r);
        cell_variance[{ri, hi}] = variance;
      }

      if (log) {
        *log << "experiment=" << cfg.experiment
             << " sampler=" << sampler_name(run.sampler)
             << " kernel_or_integrator=" << run.label << " h=" << h;
        if (want_rejection && !cell.rates.empty()) {
          const RateEstimate primary = detail::pool_rates(cell.rates);
          *log << " rejection_rate=" << primary.rate;
          if (!cell.hybrid_rates.empty())
            *log << " hybrid_rejection_rate="
                 << detail::pool_rates(cell.hybrid_rates).rate;
        }
        if (want_variance) *log << " variance=" << cell_variance[{ri, hi}];
        *log << '\n';
      }
    }
  }

  // Variance ratios against the MALA baseline at matching step sizes.
  if (want_variance) {
    std::optional<std::size_t> mala_idx;
    for (std::size_t ri = 0; ri < cfg.runs.size(); ++ri)
      if (cfg.runs[ri].sampler == SamplerKind::mala) mala_idx = ri;
    if (mala_idx) {
      for (std::size_t ri = 0; ri < cfg.runs.size(); ++ri) {
        if (ri == *mala_idx) continue;
        for (std::size_t hi = 0; hi < cfg.h_grid.size(); ++hi) {
          const auto it_m = cell_variance.find({*mala_idx, hi});
          const auto it_s = cell_variance.find({ri, hi});
          if (it_m == cell_variance.end() || it_s == cell_variance.end())
            continue;
          if (!(it_s->second > 0.0) || !std::isfinite(it_m->second)) continue;
          const double ratio = it_m->second / it_s->second;
          const auto ci =
              variance_ratio_ci95(ratio, cfg.n_replicates, cfg.n_replicates);
          CsvRow r;
          r.experiment = cfg.experiment;
          r.sampler = sampler_name(cfg.runs[ri].sampler);
          r.kernel_or_integrator = cfg.runs[ri].label;
          r.alpha = cfg.alpha;
          r.h = cfg.h_grid[hi];
          r.metric_name = "variance_ratio_vs_mala";
          r.value = ratio;
          r.err = 0.5 * (ci.second - ci.first);
          r.n_samples = cfg.n_samples;
          r.n_replicates = cfg.n_replicates;
          r.seed = derive_seed(derive_seed(cfg.master_seed, ri), hi);
          rows.push_back(r);
        }
      }
    }
  }

  sort_csv_rows(rows);
  return rows;
}

}  // namespace liftmala
