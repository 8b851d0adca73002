#pragma once

#include <cmath>
#include <utility>

#include "liftmala/common.hpp"

namespace liftmala {

struct PicardConfig {
  double tol = 1e-12;
  int max_iter = 100;
};

struct PicardResult {
  Vec solution;
  int iterations = 0;
};

/// Fixed-point iteration y <- map(y) until the residual ||map(y) - y||
/// drops to tol. Returns the verified iterate, so the postcondition
/// ||y - map(y)|| <= tol holds for the result as stated. Throws
/// PicardDivergenceError when the residual turns non-finite or the budget
/// runs out.
template <class Map>
PicardResult picard_solve(Map&& map, Vec init, const PicardConfig& cfg = {}) {
  if (!(cfg.tol > 0.0)) throw ConfigError("fixed-point tolerance must be positive");
  if (cfg.max_iter < 1) throw ConfigError("fixed-point iteration budget must be at least 1");
  Vec y = std::move(init);
  double residual = 0.0;
  for (int k = 0; k <= cfg.max_iter; ++k) {
    Vec fy = map(y);
    residual = (fy - y).norm();
    if (!std::isfinite(residual)) throw PicardDivergenceError(residual, k);
    if (residual <= cfg.tol) return {std::move(y), k};
    if (k == cfg.max_iter) break;
    y = std::move(fy);
  }
  throw PicardDivergenceError(residual, cfg.max_iter);
}

}  // namespace liftmala
