#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "liftmala/common.hpp"
#include "liftmala/sampler.hpp"

namespace liftmala {

/// Integrated autocorrelation time tau = 1 + 2 sum_k rho_k, estimated with
/// the initial-positive-sequence rule: sums of adjacent autocorrelation
/// pairs are accumulated until the first non-positive pair. Never below 1.
inline double integrated_autocorrelation_time(const std::vector<double>& trace) {
  const long n = static_cast<long>(trace.size());
  if (n < 100)
    throw ConfigError("autocorrelation estimate needs at least 100 samples");
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(n);
  auto acov = [&](long lag) {
    double s = 0.0;
    for (long i = 0; i + lag < n; ++i)
      s += (trace[i] - mean) * (trace[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) return 1.0;  // constant sequence
  double tau = -1.0;
  for (long m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (acov(2 * m) + acov(2 * m + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return std::max(1.0, tau);
}

struct RateEstimate {
  double rate = 0.0;
  double se = 0.0;
};

/// Rejection fraction of an acceptance trace with a binomial standard error
/// inflated by the autocorrelation time of the indicator sequence.
inline RateEstimate rejection_rate_from_trace(
    const std::vector<std::uint8_t>& accepts) {
  if (accepts.empty()) throw ConfigError("empty acceptance trace");
  const double n = static_cast<double>(accepts.size());
  long rejected = 0;
  for (auto a : accepts) rejected += a ? 0 : 1;
  const double p = static_cast<double>(rejected) / n;
  double tau = 1.0;
  if (accepts.size() >= 100 && rejected > 0 &&
      rejected < static_cast<long>(accepts.size())) {
    std::vector<double> indicator(accepts.size());
    for (std::size_t i = 0; i < accepts.size(); ++i)
      indicator[i] = accepts[i] ? 0.0 : 1.0;
    tau = integrated_autocorrelation_time(indicator);
  }
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p) * tau / n))};
}

struct RejectionReport {
  RateEstimate primary;                // the single MH decision, or MALA substep
  std::optional<RateEstimate> hybrid;  // ghmala second substep
};

inline RejectionReport rejection_rate(const SamplerSetup& setup,
                                      const ChainConfig& cfg) {
  const ChainResult res = run_chain(make_stepper(setup), cfg);
  RejectionReport report;
  report.primary = rejection_rate_from_trace(res.accept_trace);
  if (!res.hybrid_accept_trace.empty())
    report.hybrid = rejection_rate_from_trace(res.hybrid_accept_trace);
  return report;
}

/// Two-sided 95% confidence interval for the population variance from a
/// sample variance s2 with n observations (normal-theory chi-square bounds).
inline std::pair<double, double> variance_ci95(double s2, int n) {
  if (n < 2) throw ConfigError("variance interval needs at least 2 replicates");
  boost::math::chi_squared dist(static_cast<double>(n - 1));
  const double df = static_cast<double>(n - 1);
  return {df * s2 / boost::math::quantile(dist, 0.975),
          df * s2 / boost::math::quantile(dist, 0.025)};
}

struct ReplicateStats {
  int n_replicates = 0;
  long n_samples = 0;
  std::vector<double> estimates;
  double mean = 0.0;
  double variance = 0.0;  // unbiased across replicates
  std::pair<double, double> variance_ci{0.0, 0.0};
};

/// Runs `estimator` once per replicate with seeds derived from master_seed
/// and summarizes the spread of the estimates. The estimator must be pure
/// given its seed; replicates may execute on several threads.
template <class Fn>
ReplicateStats replicate_variance(Fn&& estimator, int n_replicates,
                                  long n_samples, std::uint64_t master_seed,
                                  int threads = 1) {
  if (n_replicates < 2) throw ConfigError("need at least 2 replicates");
  ReplicateStats stats;
  stats.n_replicates = n_replicates;
  stats.n_samples = n_samples;
  stats.estimates.resize(n_replicates);
  parallel_for(n_replicates, threads, [&](long i) {
    stats.estimates[i] =
        estimator(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
  });
  double sum = 0.0;
  for (double e : stats.estimates) sum += e;
  stats.mean = sum / n_replicates;
  double ss = 0.0;
  for (double e : stats.estimates) ss += (e - stats.mean) * (e - stats.mean);
  stats.variance = ss / (n_replicates - 1);
  stats.variance_ci = variance_ci95(stats.variance, n_replicates);
  return stats;
}

/// Replicated time averages of `obs` under the given sampler. Each replicate
/// reruns the chain in `base` with a derived seed.
inline ReplicateStats replicate_variance(const SamplerSetup& setup,
                                         const Observable& obs,
                                         const ChainConfig& base,
                                         int n_replicates,
                                         std::uint64_t master_seed,
                                         int threads = 1) {
  const StepFn step = make_stepper(setup);
  auto estimator = [&](std::uint64_t seed) {
    ChainConfig cfg = base;
    cfg.seed = seed;
    return run_chain(step, cfg, &obs).time_average;
  };
  return replicate_variance(estimator, n_replicates, base.n_steps, master_seed,
                            threads);
}

struct ScalingFit {
  std::vector<double> h_values;
  std::vector<double> y_values;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log(y) on log(h). Throws std::domain_error on
/// non-positive inputs rather than fitting through garbage.
inline ScalingFit loglog_slope(std::vector<double> h, std::vector<double> y) {
  if (h.size() != y.size())
    throw ConfigError("scaling fit needs matching h and y lengths");
  if (h.size() < 3) throw ConfigError("scaling fit needs at least 3 points");
  const long n = static_cast<long>(h.size());
  std::vector<double> lx(n), ly(n);
  for (long i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) throw std::domain_error("step sizes must be positive");
    if (!(y[i] > 0.0))
      throw std::domain_error("log-log fit needs strictly positive values");
    lx[i] = std::log(h[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (long i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (long i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("scaling fit needs distinct step sizes");
  ScalingFit fit;
  fit.h_values = std::move(h);
  fit.y_values = std::move(y);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace liftmala
