#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "liftmala/common.hpp"

namespace liftmala {

/// Unnormalized density pi(x) = exp(-U(x)) described by its energy U,
/// gradient and (optionally) Hessian. `separable` marks potentials of the
/// form U(x) = sum_i U_i(x_i).
struct Target {
  int dim = 0;
  std::function<double(const Vec&)> potential;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;  // empty when not available
  bool separable = false;
  std::string name;

  bool has_hessian() const { return static_cast<bool>(hessian); }
};

struct Observable {
  std::function<double(const Vec&)> f;
  std::string name;
};

using Params = std::map<std::string, double>;

namespace detail {

inline Target std_gaussian_target(int dim) {
  Target t;
  t.dim = dim;
  t.name = "std_gaussian";
  t.separable = true;
  t.potential = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  t.gradient = [](const Vec& x) { return Vec(x); };
  t.hessian = [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); };
  return t;
}

// U(x) = x1^2 / sqrt(1 + 50 x1^2) + x2^2: light sub-quadratic tails in x1,
// Gaussian in x2.
inline Target anisotropic_target() {
  Target t;
  t.dim = 2;
  t.name = "anisotropic";
  t.separable = true;
  t.potential = [](const Vec& x) {
    const double s = x[0] * x[0];
    return s / std::sqrt(1.0 + 50.0 * s) + x[1] * x[1];
  };
  t.gradient = [](const Vec& x) {
    const double s = x[0] * x[0];
    const double q = 1.0 + 50.0 * s;
    Vec g(2);
    g[0] = x[0] * (2.0 + 50.0 * s) * std::pow(q, -1.5);
    g[1] = 2.0 * x[1];
    return g;
  };
  t.hessian = [](const Vec& x) {
    const double s = x[0] * x[0];
    const double q = 1.0 + 50.0 * s;
    Mat hess = Mat::Zero(2, 2);
    hess(0, 0) = (2.0 - 50.0 * s) * std::pow(q, -2.5);
    hess(1, 1) = 2.0;
    return hess;
  };
  return t;
}

// U(x) = x1^2/100 + (x2 + x1^2/20 - 5)^2: a curved ridge along the
// parabola x2 = 5 - x1^2/20.
inline Target warped_gaussian_target() {
  Target t;
  t.dim = 2;
  t.name = "warped_gaussian";
  t.separable = false;
  t.potential = [](const Vec& x) {
    const double w = x[1] + x[0] * x[0] / 20.0 - 5.0;
    return x[0] * x[0] / 100.0 + w * w;
  };
  t.gradient = [](const Vec& x) {
    const double w = x[1] + x[0] * x[0] / 20.0 - 5.0;
    Vec g(2);
    g[0] = x[0] / 50.0 + x[0] * w / 5.0;
    g[1] = 2.0 * w;
    return g;
  };
  t.hessian = [](const Vec& x) {
    const double w = x[1] + x[0] * x[0] / 20.0 - 5.0;
    Mat hess(2, 2);
    hess(0, 0) = 1.0 / 50.0 + w / 5.0 + x[0] * x[0] / 50.0;
    hess(0, 1) = x[0] / 5.0;
    hess(1, 0) = x[0] / 5.0;
    hess(1, 1) = 2.0;
    return hess;
  };
  return t;
}

// U(x) = x1^2/100 + x2^4: wide Gaussian times a quartic well.
inline Target quartic_gaussian_target() {
  Target t;
  t.dim = 2;
  t.name = "quartic_gaussian";
  t.separable = true;
  t.potential = [](const Vec& x) {
    const double s = x[1] * x[1];
    return x[0] * x[0] / 100.0 + s * s;
  };
  t.gradient = [](const Vec& x) {
    Vec g(2);
    g[0] = x[0] / 50.0;
    g[1] = 4.0 * x[1] * x[1] * x[1];
    return g;
  };
  t.hessian = [](const Vec& x) {
    Mat hess = Mat::Zero(2, 2);
    hess(0, 0) = 1.0 / 50.0;
    hess(1, 1) = 12.0 * x[1] * x[1];
    return hess;
  };
  return t;
}

}  // namespace detail

/// Builds one of the benchmark targets. Only "std_gaussian" takes a
/// parameter ("dim", default 2); the others are fixed two-dimensional.
inline Target make_builtin_target(const std::string& name,
                                  const Params& params = {}) {
  for (const auto& [key, value] : params) {
    if (name == "std_gaussian" && key == "dim") continue;
    throw ConfigError("target preset '" + name + "' takes no parameter '" +
                      key + "'");
  }
  if (name == "std_gaussian") {
    int dim = 2;
    if (auto it = params.find("dim"); it != params.end()) {
      if (it->second < 1.0 || it->second != std::floor(it->second))
        throw ConfigError("std_gaussian dim must be a positive integer");
      dim = static_cast<int>(it->second);
    }
    return detail::std_gaussian_target(dim);
  }
  if (name == "anisotropic") return detail::anisotropic_target();
  if (name == "warped_gaussian") return detail::warped_gaussian_target();
  if (name == "quartic_gaussian") return detail::quartic_gaussian_target();
  throw ConfigError("unknown target preset '" + name +
                    "' (expected std_gaussian, anisotropic, warped_gaussian "
                    "or quartic_gaussian)");
}

/// Caps the gradient norm at `radius`, leaving direction, potential and
/// Hessian untouched. Stabilizes explicit proposals far out in the tails.
inline Target truncate_gradient(const Target& t, double radius) {
  if (!(radius > 0.0)) throw ConfigError("truncation radius must be positive");
  Target out = t;
  auto grad = t.gradient;
  out.gradient = [grad, radius](const Vec& x) {
    Vec g = grad(x);
    const double n = g.norm();
    if (n > radius) g *= radius / n;
    return g;
  };
  return out;
}

/// Max componentwise discrepancy between the analytic gradient and a central
/// difference of the potential, relative to max(1, |difference|).
inline double check_gradient(const Target& t, const Vec& x, double eps) {
  if (!(eps > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Vec g = t.gradient(x);
  Vec probe = x;
  double worst = 0.0;
  for (int i = 0; i < t.dim; ++i) {
    probe[i] = x[i] + eps;
    const double up = t.potential(probe);
    probe[i] = x[i] - eps;
    const double down = t.potential(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * eps);
    const double err = std::abs(g[i] - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, err);
  }
  return worst;
}

inline Observable make_observable(const std::string& name) {
  if (name == "indicator_tail_quadratic")
    return {[](const Vec& x) { return x[0] > 15.0 ? x[0] * x[0] : 0.0; }, name};
  if (name == "radius_squared")
    return {[](const Vec& x) { return x.squaredNorm(); }, name};
  throw ConfigError("unknown observable preset '" + name +
                    "' (expected indicator_tail_quadratic or radius_squared)");
}

/// Wraps the gradient so each evaluation bumps *counter. The counter is not
/// atomic; use only on single-threaded chains.
inline Target counted_gradient(const Target& t, std::shared_ptr<long> counter) {
  Target out = t;
  auto grad = t.gradient;
  out.gradient = [grad, counter = std::move(counter)](const Vec& x) {
    ++*counter;
    return grad(x);
  };
  return out;
}

}  // namespace liftmala
