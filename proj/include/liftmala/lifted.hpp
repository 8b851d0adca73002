#pragma once

#include <utility>

#include "liftmala/common.hpp"
#include "liftmala/target.hpp"

namespace liftmala {

/// Point of the lifted state space: a position paired with a direction flag
/// xi in {-1, +1}.
struct LiftedState {
  Vec x;
  int xi = 1;
};

inline LiftedState flip(LiftedState s) {
  s.xi = -s.xi;
  return s;
}

/// Skew-symmetric matrix J defining the energy-conserving circulation
/// gamma(x) = -J grad U(x). Any rotation intensity is folded into J.
class SkewDrift {
 public:
  SkewDrift() : j_(Mat::Zero(2, 2)) {}

  explicit SkewDrift(Mat j) : j_(std::move(j)) {
    if (j_.rows() != j_.cols())
      throw ConfigError("drift matrix must be square");
    for (Eigen::Index r = 0; r < j_.rows(); ++r)
      for (Eigen::Index c = r; c < j_.cols(); ++c)
        if (j_(r, c) + j_(c, r) != 0.0)
          throw ConfigError("drift matrix must be skew-symmetric");
  }

  const Mat& matrix() const { return j_; }
  int dim() const { return static_cast<int>(j_.rows()); }

 private:
  Mat j_;
};

/// J = alpha * [[0, 1], [-1, 0]], the planar rotation generator.
inline SkewDrift make_rotation_drift(double alpha, int dim = 2) {
  if (dim != 2)
    throw ConfigError("rotation drift preset is two-dimensional");
  Mat j(2, 2);
  j << 0.0, alpha, -alpha, 0.0;
  return SkewDrift(std::move(j));
}

/// gamma(x) = -J grad U(x); tangent to the level sets of U.
inline Vec gamma_field(const Target& t, const SkewDrift& d, const Vec& x) {
  return -(d.matrix() * t.gradient(x));
}

/// Proposal drift b_xi(x) = -(I + xi J) grad U(x). xi = 0 is reserved for
/// the plain overdamped drift -grad U(x) and ignores J entirely.
inline Vec drift(const Target& t, const SkewDrift& d, const Vec& x, int xi) {
  Vec g = t.gradient(x);
  if (xi == 0) return -g;
  if (x.size() != d.dim())
    throw ConfigError("drift matrix dimension does not match the state");
  return -(g + static_cast<double>(xi) * (d.matrix() * g));
}

inline Vec drift(const Target& t, const SkewDrift& d, const LiftedState& s) {
  return drift(t, d, s.x, s.xi);
}

}  // namespace liftmala
