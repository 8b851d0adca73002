#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "liftmala/common.hpp"
#include "liftmala/lifted.hpp"
#include "liftmala/picard.hpp"
#include "liftmala/target.hpp"

namespace liftmala {

/// One deterministic step y = Phi_h^xi(x) of the circulation flow. Every
/// integrator here satisfies Phi_h^{-xi} = (Phi_h^{xi})^{-1} (direction flip
/// inverts the step) and preserves volume, up to the solver tolerance.
struct Integrator {
  std::function<Vec(const LiftedState&, double)> step;
  std::string name;
  bool requires_hessian = false;
};

/// Implicit midpoint rule for y = x + h xi J grad U((x + y) / 2), solved by
/// fixed-point iteration. The tight default tolerance keeps the volume
/// defect below what a finite-difference Jacobian can resolve.
inline Integrator midpoint_integrator(Target t, SkewDrift d,
                                      PicardConfig cfg = {1e-13, 200}) {
  Integrator integ;
  integ.name = "midpoint";
  integ.step = [t = std::move(t), d = std::move(d), cfg](const LiftedState& s,
                                                         double h) -> Vec {
    const Mat& j = d.matrix();
    auto map = [&](const Vec& y) -> Vec {
      return s.x + (h * s.xi) * (j * t.gradient(0.5 * (s.x + y)));
    };
    Vec init = s.x + (h * s.xi) * (j * t.gradient(s.x));
    return picard_solve(map, std::move(init), cfg).solution;
  };
  return integ;
}

/// Unit-Jacobian change of variables used to conjugate the midpoint rule.
/// When the pushforward energy is quadratic, U(psi^{-1}(u)) = u^T A u / 2,
/// `quadratic_pushforward` holds A and the inner step becomes an exact
/// linear solve.
struct ShearMap {
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> inverse;
  std::function<Mat(const Vec&)> inverse_jacobian;
  std::optional<Mat> quadratic_pushforward;
  std::string name;
};

/// "warped_shear" straightens the parabolic ridge of the warped Gaussian:
/// u = (x1, x2 + x1^2/20 - 5), with pushforward energy u1^2/100 + u2^2.
inline ShearMap make_shear_preset(const std::string& name) {
  if (name == "warped_shear") {
    ShearMap m;
    m.name = name;
    m.forward = [](const Vec& x) {
      Vec u(2);
      u << x[0], x[1] + x[0] * x[0] / 20.0 - 5.0;
      return u;
    };
    m.inverse = [](const Vec& u) {
      Vec x(2);
      x << u[0], u[1] - u[0] * u[0] / 20.0 + 5.0;
      return x;
    };
    m.inverse_jacobian = [](const Vec& u) {
      Mat j(2, 2);
      j << 1.0, 0.0, -u[0] / 10.0, 1.0;
      return j;
    };
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 0.02;
    a(1, 1) = 2.0;
    m.quadratic_pushforward = a;
    return m;
  }
  throw ConfigError("unknown shear preset '" + name + "'");
}

/// Midpoint rule conjugated by psi: map to u = psi(x), integrate the
/// pushforward circulation J grad(U o psi^{-1}), map back. Since psi has
/// unit Jacobian the composition stays volume-preserving, and flipping xi
/// still inverts the step.
inline Integrator conjugated_midpoint_integrator(Target t, SkewDrift d,
                                                 ShearMap psi,
                                                 PicardConfig cfg = {1e-13,
                                                                     200}) {
  if (t.dim != 2)
    throw ConfigError("conjugated midpoint integrator is two-dimensional");
  Integrator integ;
  integ.name = "conjugated_midpoint";
  integ.step = [t = std::move(t), d = std::move(d), psi = std::move(psi),
                cfg](const LiftedState& s, double h) -> Vec {
    const Mat& j = d.matrix();
    const Vec u = psi.forward(s.x);
    Vec v;
    if (psi.quadratic_pushforward) {
      // grad of the quadratic pushforward is A u, so the midpoint step is
      // the exact Cayley-type solve (I - (h xi / 2) J A) v = (I + ...) u.
      const Mat ja = (0.5 * h * s.xi) * (j * *psi.quadratic_pushforward);
      const Mat eye = Mat::Identity(t.dim, t.dim);
      v = (eye - ja).partialPivLu().solve((eye + ja) * u);
    } else {
      auto grad_push = [&](const Vec& w) -> Vec {
        return psi.inverse_jacobian(w).transpose() *
               t.gradient(psi.inverse(w));
      };
      auto map = [&](const Vec& w) -> Vec {
        return u + (h * s.xi) * (j * grad_push(0.5 * (u + w)));
      };
      Vec init = u + (h * s.xi) * (j * grad_push(u));
      v = picard_solve(map, std::move(init), cfg).solution;
    }
    return psi.inverse(v);
  };
  return integ;
}

/// Explicit palindromic splitting for separable potentials and the rotation
/// drift. Each stage only moves one coordinate by a function of the other,
/// so every stage is an exact shear: volume is preserved to machine
/// precision and the reversed palindrome undoes the step exactly.
inline Integrator explicit_splitting_integrator(Target t, SkewDrift d) {
  if (t.dim != 2)
    throw ConfigError("splitting integrator is two-dimensional");
  if (!t.separable)
    throw ConfigError("splitting integrator requires a separable potential");
  if (d.dim() != 2)
    throw ConfigError("splitting integrator requires the rotation drift");
  const double alpha = d.matrix()(0, 1);
  Integrator integ;
  integ.name = "explicit_splitting";
  integ.step = [t = std::move(t), alpha](const LiftedState& s,
                                         double h) -> Vec {
    const double k = h * alpha * s.xi;
    Vec p = s.x;
    p[0] -= 0.5 * k * t.gradient(p)[1];
    p[1] += k * t.gradient(p)[0];
    p[0] -= 0.5 * k * t.gradient(p)[1];
    return p;
  };
  return integ;
}

struct IntegratorDefects {
  double reversibility = 0.0;  // || Phi_h^{-xi}(Phi_h^{xi}(x)) - x ||
  double volume = 0.0;         // | det(d Phi / d x) - 1 |, central differences
  double energy = 0.0;         // | U(Phi(x)) - U(x) |
};

inline IntegratorDefects verify_integrator(const Integrator& integ,
                                           const Target& t, const Vec& x,
                                           int xi, double h) {
  const Vec y = integ.step(LiftedState{x, xi}, h);
  const Vec back = integ.step(LiftedState{y, -xi}, h);

  const double delta = 1e-6;
  Mat jac(t.dim, t.dim);
  for (int c = 0; c < t.dim; ++c) {
    Vec xp = x;
    Vec xm = x;
    xp[c] += delta;
    xm[c] -= delta;
    const Vec yp = integ.step(LiftedState{std::move(xp), xi}, h);
    const Vec ym = integ.step(LiftedState{std::move(xm), xi}, h);
    jac.col(c) = (yp - ym) / (2.0 * delta);
  }

  IntegratorDefects defects;
  defects.reversibility = (back - x).norm();
  defects.volume = std::abs(jac.determinant() - 1.0);
  defects.energy = std::abs(t.potential(y) - t.potential(x));
  return defects;
}

}  // namespace liftmala
