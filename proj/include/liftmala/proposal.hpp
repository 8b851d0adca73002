#pragma once

#include <cmath>
#include <utility>

#include "liftmala/common.hpp"
#include "liftmala/lifted.hpp"
#include "liftmala/picard.hpp"

namespace liftmala {

/// Proposed point plus the normal deviate that produced it. picard_iters is
/// 0 for the explicit kernels.
struct ProposalOutcome {
  Vec y;
  Vec chi;
  int picard_iters = 0;
};

inline constexpr double kLog4Pi = 2.5310242469692908;

// ---------------------------------------------------------------------------
// Kernel 1: Euler discretization of the lifted dynamics,
//   y = x + h b_xi(x) + sqrt(2h) chi,  b_xi = -(I + xi J) grad U.
// Gaussian with a rotated mean, so the density is explicit.
// ---------------------------------------------------------------------------

inline ProposalOutcome q1_propose(const Target& t, const SkewDrift& d, int xi,
                                  const Vec& x, double h, Vec chi) {
  Vec y = x + h * drift(t, d, x, xi) + std::sqrt(2.0 * h) * chi;
  return {std::move(y), std::move(chi), 0};
}

inline ProposalOutcome q1_propose(const Target& t, const SkewDrift& d,
                                  const LiftedState& s, double h, Vec chi) {
  return q1_propose(t, d, s.xi, s.x, h, std::move(chi));
}

template <class G>
ProposalOutcome q1_sample(const Target& t, const SkewDrift& d,
                          const LiftedState& s, double h, G& rng) {
  return q1_propose(t, d, s, h, standard_normal(t.dim, rng));
}

/// log density of y under the kernel started at x with direction xi:
/// N(x + h b_xi(x), 2h I).
inline double q1_log_density(const Target& t, const SkewDrift& d, int xi,
                             const Vec& x, const Vec& y, double h) {
  const Vec mean = x + h * drift(t, d, x, xi);
  const double dim = static_cast<double>(t.dim);
  return -0.5 * dim * (kLog4Pi + std::log(h)) -
         (y - mean).squaredNorm() / (4.0 * h);
}

// ---------------------------------------------------------------------------
// Kernel 2: the circulation is integrated implicitly at the midpoint. With
//   Phi(y) = y + h xi gamma((x + y) / 2),  gamma = -J grad U,
// the proposal solves Phi(y) = x - h grad U(x) + sqrt(2h) chi by fixed-point
// iteration started at the explicit predictor. The map shifts volume like a
// shear: the forward and reverse Jacobians cancel in the acceptance ratio,
// which therefore only needs the reconstructed deviates.
// ---------------------------------------------------------------------------

inline Vec q2_forward_map(const Target& t, const SkewDrift& d, int xi,
                          const Vec& x, const Vec& y, double h) {
  return y + (h * xi) * gamma_field(t, d, 0.5 * (x + y));
}

inline ProposalOutcome q2_propose(const Target& t, const SkewDrift& d,
                                  const LiftedState& s, double h, Vec chi,
                                  const PicardConfig& cfg = {}) {
  const Vec rhs = s.x - h * t.gradient(s.x) + std::sqrt(2.0 * h) * chi;
  Vec init = q1_propose(t, d, s, h, chi).y;
  auto map = [&](const Vec& y) -> Vec {
    return rhs - (h * s.xi) * gamma_field(t, d, 0.5 * (s.x + y));
  };
  PicardResult sol = picard_solve(map, std::move(init), cfg);
  return {std::move(sol.solution), std::move(chi), sol.iterations};
}

template <class G>
ProposalOutcome q2_sample(const Target& t, const SkewDrift& d,
                          const LiftedState& s, double h, G& rng,
                          const PicardConfig& cfg = {}) {
  return q2_propose(t, d, s, h, standard_normal(t.dim, rng), cfg);
}

/// log of the acceptance ratio pi(y) q_{-xi}(y, x) / (pi(x) q_xi(x, y)).
/// Both transports share the midpoint (x + y) / 2, so gamma is evaluated
/// once and the Jacobian factors drop out exactly.
inline double q2_log_mh_ratio(const Target& t, const SkewDrift& d,
                              const LiftedState& s, const Vec& y, double h) {
  const Vec& x = s.x;
  const Vec gamma_mid = gamma_field(t, d, 0.5 * (x + y));
  const double scale = std::sqrt(2.0 * h);
  const Vec chi_fwd = (y + (h * s.xi) * gamma_mid - x + h * t.gradient(x)) / scale;
  const Vec chi_rev = (x - (h * s.xi) * gamma_mid - y + h * t.gradient(y)) / scale;
  return t.potential(x) - t.potential(y) +
         0.5 * (chi_fwd.squaredNorm() - chi_rev.squaredNorm());
}

// ---------------------------------------------------------------------------
// Kernel 3: semi-implicit linearization. The circulation is made implicit
// through the local Hessian,
//   M_xi(x) = I + (h xi / 2) J Hess U(x),
//   M_xi(x) (y - x) = h b_xi(x) + sqrt(2h) chi,
// which keeps the proposal Gaussian (with covariance 2h (M M^T)^{-1}) while
// borrowing the midpoint's stability.
// ---------------------------------------------------------------------------

inline Mat q3_matrix(const Target& t, const SkewDrift& d, int xi, const Vec& x,
                     double h) {
  if (!t.has_hessian())
    throw ConfigError("kernel q3 requires a target with a Hessian");
  return Mat::Identity(t.dim, t.dim) +
         (0.5 * h * xi) * (d.matrix() * t.hessian(x));
}

inline ProposalOutcome q3_propose(const Target& t, const SkewDrift& d,
                                  const LiftedState& s, double h, Vec chi) {
  const Mat m = q3_matrix(t, d, s.xi, s.x, h);
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible())
    throw NumericalError("singular q3 proposal matrix; reduce h or alpha");
  const Vec rhs = h * drift(t, d, s) + std::sqrt(2.0 * h) * chi;
  Vec y = s.x + lu.solve(rhs);
  return {std::move(y), std::move(chi), 0};
}

template <class G>
ProposalOutcome q3_sample(const Target& t, const SkewDrift& d,
                          const LiftedState& s, double h, G& rng) {
  return q3_propose(t, d, s, h, standard_normal(t.dim, rng));
}

inline double q3_log_density(const Target& t, const SkewDrift& d, int xi,
                             const Vec& x, const Vec& y, double h) {
  const Mat m = q3_matrix(t, d, xi, x, h);
  const double det = m.determinant();
  if (!(std::abs(det) > 0.0))
    throw NumericalError("singular q3 proposal matrix; reduce h or alpha");
  const Vec r = m * (y - x) - h * drift(t, d, x, xi);
  const double dim = static_cast<double>(t.dim);
  return -0.5 * dim * (kLog4Pi + std::log(h)) + std::log(std::abs(det)) -
         r.squaredNorm() / (4.0 * h);
}

}  // namespace liftmala
