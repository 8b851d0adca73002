#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftmala/common.hpp"
#include "liftmala/integrator.hpp"
#include "liftmala/lifted.hpp"
#include "liftmala/proposal.hpp"

namespace liftmala {

enum class Kernel { q1, q2, q3 };
enum class SamplerKind { mala, gmala, ghmala };

inline std::string kernel_name(Kernel k) {
  switch (k) {
    case Kernel::q1: return "q1";
    case Kernel::q2: return "q2";
    case Kernel::q3: return "q3";
  }
  return {};
}

inline Kernel parse_kernel(const std::string& s) {
  if (s == "q1") return Kernel::q1;
  if (s == "q2") return Kernel::q2;
  if (s == "q3") return Kernel::q3;
  throw ConfigError("unknown kernel '" + s + "' (expected q1, q2 or q3)");
}

inline std::string sampler_name(SamplerKind s) {
  switch (s) {
    case SamplerKind::mala: return "mala";
    case SamplerKind::gmala: return "gmala";
    case SamplerKind::ghmala: return "ghmala";
  }
  return {};
}

inline SamplerKind parse_sampler(const std::string& s) {
  if (s == "mala") return SamplerKind::mala;
  if (s == "gmala") return SamplerKind::gmala;
  if (s == "ghmala") return SamplerKind::ghmala;
  throw ConfigError("unknown sampler '" + s +
                    "' (expected mala, gmala or ghmala)");
}

struct StepRecord {
  LiftedState state;
  bool accepted = true;       // the MH decision; for ghmala, the hybrid substep
  bool mala_accepted = true;  // ghmala first substep; mirrors `accepted` otherwise
  bool two_stage = false;
  double log_ratio = 0.0;
  int picard_iters = 0;
};

template <class G>
bool mh_accept(double log_ratio, G& rng) {
  if (log_ratio >= 0.0) return true;
  std::uniform_real_distribution<double> unif;
  return std::log(unif(rng)) < log_ratio;
}

/// log of pi(y) q_{-xi}(y, x) / (pi(x) q_xi(x, y)) for the given kernel.
inline double gmala_log_ratio(const Target& t, const SkewDrift& d, Kernel k,
                              const LiftedState& s, const Vec& y, double h) {
  switch (k) {
    case Kernel::q2:
      return q2_log_mh_ratio(t, d, s, y, h);
    case Kernel::q1:
      return t.potential(s.x) - t.potential(y) +
             q1_log_density(t, d, -s.xi, y, s.x, h) -
             q1_log_density(t, d, s.xi, s.x, y, h);
    case Kernel::q3:
      return t.potential(s.x) - t.potential(y) +
             q3_log_density(t, d, -s.xi, y, s.x, h) -
             q3_log_density(t, d, s.xi, s.x, y, h);
  }
  return 0.0;
}

/// Plain MALA step, implemented as the xi = 0 specialization of the q1
/// machinery so that gmala with alpha = 0 reproduces it draw for draw.
template <class G>
StepRecord mala_step(const Target& t, const Vec& x, double h, G& rng) {
  static const SkewDrift inert;  // never touched on the xi = 0 path
  ProposalOutcome prop = q1_propose(t, inert, 0, x, h, standard_normal(t.dim, rng));
  const double lr = t.potential(x) - t.potential(prop.y) +
                    q1_log_density(t, inert, 0, prop.y, x, h) -
                    q1_log_density(t, inert, 0, x, prop.y, h);
  StepRecord rec;
  rec.log_ratio = lr;
  rec.accepted = mh_accept(lr, rng);
  rec.mala_accepted = rec.accepted;
  rec.state = LiftedState{rec.accepted ? std::move(prop.y) : x, 1};
  return rec;
}

/// One lifted MALA step: propose with the directed kernel, accept with the
/// skew-detailed-balance ratio, and flip the direction on rejection.
template <class G>
StepRecord gmala_step(const Target& t, const SkewDrift& d, Kernel k,
                      const LiftedState& s, double h, G& rng,
                      const PicardConfig& picard = {}) {
  ProposalOutcome prop;
  switch (k) {
    case Kernel::q1: prop = q1_sample(t, d, s, h, rng); break;
    case Kernel::q2: prop = q2_sample(t, d, s, h, rng, picard); break;
    case Kernel::q3: prop = q3_sample(t, d, s, h, rng); break;
  }
  const double lr = gmala_log_ratio(t, d, k, s, prop.y, h);
  StepRecord rec;
  rec.log_ratio = lr;
  rec.picard_iters = prop.picard_iters;
  rec.accepted = mh_accept(lr, rng);
  rec.mala_accepted = rec.accepted;
  rec.state = rec.accepted ? LiftedState{std::move(prop.y), s.xi} : flip(s);
  return rec;
}

/// One hybrid step: a plain MALA substep (direction untouched), then the
/// deterministic circulation step accepted with probability
/// min(1, exp(U(mid) - U(candidate))). A hybrid rejection keeps the
/// midpoint state and flips the direction.
template <class G>
StepRecord ghmala_step(const Target& t, const Integrator& integ,
                       const LiftedState& s, double h, G& rng) {
  StepRecord half = mala_step(t, s.x, h, rng);
  Vec x_mid = std::move(half.state.x);
  Vec candidate = integ.step(LiftedState{x_mid, s.xi}, h);
  const double lr = t.potential(x_mid) - t.potential(candidate);
  StepRecord rec;
  rec.two_stage = true;
  rec.mala_accepted = half.accepted;
  rec.log_ratio = lr;
  rec.accepted = mh_accept(lr, rng);
  rec.state = rec.accepted ? LiftedState{std::move(candidate), s.xi}
                           : LiftedState{std::move(x_mid), -s.xi};
  return rec;
}

struct SamplerSetup {
  Target target;
  SkewDrift drift;
  SamplerKind sampler = SamplerKind::mala;
  Kernel kernel = Kernel::q2;
  std::optional<Integrator> integrator;  // required for ghmala
  PicardConfig picard;
};

using StepFn = std::function<StepRecord(const LiftedState&, double, Rng&)>;

inline StepFn make_stepper(const SamplerSetup& setup) {
  switch (setup.sampler) {
    case SamplerKind::mala:
      return [t = setup.target](const LiftedState& s, double h, Rng& rng) {
        StepRecord rec = mala_step(t, s.x, h, rng);
        rec.state.xi = s.xi;  // direction is inert for plain MALA
        return rec;
      };
    case SamplerKind::gmala:
      return [t = setup.target, d = setup.drift, k = setup.kernel,
              p = setup.picard](const LiftedState& s, double h, Rng& rng) {
        return gmala_step(t, d, k, s, h, rng, p);
      };
    case SamplerKind::ghmala: {
      if (!setup.integrator)
        throw ConfigError("ghmala requires an integrator");
      return [t = setup.target, integ = *setup.integrator](
                 const LiftedState& s, double h, Rng& rng) {
        return ghmala_step(t, integ, s, h, rng);
      };
    }
  }
  throw ConfigError("unknown sampler kind");
}

struct ChainConfig {
  double h = 0.1;
  long n_steps = 0;
  long burn_in = 0;
  std::uint64_t seed = 0;
  LiftedState initial_state;
  bool record_observable_trace = false;
  bool record_positions = false;
};

struct ChainResult {
  double time_average = 0.0;
  long n_retained = 0;
  long proposals = 0;  // post burn-in; MALA substep tallies for ghmala
  long accepts = 0;
  long hybrid_proposals = 0;
  long hybrid_accepts = 0;
  long flips = 0;
  long total_picard_iters = 0;
  long gradient_calls = 0;  // filled by callers that wrap the target
  std::vector<std::uint8_t> accept_trace;
  std::vector<std::uint8_t> hybrid_accept_trace;
  std::vector<double> observable_trace;
  std::vector<Vec> positions;
  LiftedState final_state;
};

/// Drives `step` for n_steps and accumulates the post-burn-in time average
/// of the observable (when given) plus acceptance bookkeeping.
inline ChainResult run_chain(const StepFn& step, const ChainConfig& cfg,
                             const Observable* obs = nullptr) {
  if (!(cfg.h > 0.0)) throw ConfigError("step size h must be positive");
  if (cfg.n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.n_steps)
    throw ConfigError("burn-in must satisfy 0 <= burn_in < n_steps");
  if (cfg.initial_state.x.size() == 0)
    throw ConfigError("initial state is empty");

  Rng rng(cfg.seed);
  LiftedState state = cfg.initial_state;
  ChainResult out;
  const long keep = cfg.n_steps - cfg.burn_in;
  out.accept_trace.reserve(keep);
  if (cfg.record_observable_trace && obs) out.observable_trace.reserve(keep);

  double sum = 0.0;
  for (long n = 1; n <= cfg.n_steps; ++n) {
    StepRecord rec = step(state, cfg.h, rng);
    const bool flipped = rec.state.xi != state.xi;
    state = std::move(rec.state);
    if (n <= cfg.burn_in) continue;

    out.flips += flipped;
    out.total_picard_iters += rec.picard_iters;
    ++out.proposals;
    out.accepts += rec.two_stage ? rec.mala_accepted : rec.accepted;
    out.accept_trace.push_back(rec.two_stage ? rec.mala_accepted : rec.accepted);
    if (rec.two_stage) {
      ++out.hybrid_proposals;
      out.hybrid_accepts += rec.accepted;
      out.hybrid_accept_trace.push_back(rec.accepted);
    }
    if (obs) {
      const double value = obs->f(state.x);
      sum += value;
      if (cfg.record_observable_trace) out.observable_trace.push_back(value);
    }
    if (cfg.record_positions) out.positions.push_back(state.x);
  }
  out.n_retained = keep;
  out.time_average = obs ? sum / static_cast<double>(keep) : 0.0;
  out.final_state = std::move(state);
  return out;
}

}  // namespace liftmala
