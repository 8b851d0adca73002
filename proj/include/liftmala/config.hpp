#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftmala/common.hpp"
#include "liftmala/sampler.hpp"

namespace liftmala {

/// One sampler to run over the step-size grid. `label` is what the CSV
/// kernel_or_integrator column shows: the kernel for gmala, the integrator
/// for ghmala, "-" for mala.
struct RunSpec {
  SamplerKind sampler = SamplerKind::mala;
  Kernel kernel = Kernel::q2;
  std::string integrator;
  std::string label = "-";
};

struct ExperimentConfig {
  std::string experiment;
  std::string target;
  int dim = 2;  // std_gaussian only
  std::string observable;
  double alpha = 1.0;
  std::vector<double> h_grid;
  long n_samples = 0;
  int n_replicates = 1;
  double burn_in_fraction = 0.1;
  std::uint64_t master_seed = 0;
  double picard_tol = 1e-12;
  int picard_max_iter = 100;
  double truncation_radius = 0.0;  // 0 disables gradient truncation
  int initial_direction = 1;
  std::string output_path;
  std::vector<RunSpec> runs;

  long burn_in() const {
    return static_cast<long>(std::floor(burn_in_fraction *
                                        static_cast<double>(n_samples)));
  }
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  g.back() = hi;
  return g;
}

struct PresetDefaults {
  std::string target = "std_gaussian";
  std::string observable = "radius_squared";
  std::vector<double> h_grid;
  long n_samples = 10000;
  int n_replicates = 1;
  double alpha = 1.0;
  double burn_in_fraction = 0.1;
  double truncation_radius = 0.0;
  std::vector<RunSpec> runs;
};

inline RunSpec mala_run() { return {SamplerKind::mala, Kernel::q2, "", "-"}; }

inline RunSpec gmala_run(Kernel k) {
  return {SamplerKind::gmala, k, "", kernel_name(k)};
}

inline RunSpec ghmala_run(const std::string& integrator) {
  return {SamplerKind::ghmala, Kernel::q2, integrator, integrator};
}

inline std::optional<PresetDefaults> preset_defaults(const std::string& id) {
  PresetDefaults d;
  if (id == "rejection_q1_vs_q2" || id == "rejection_all") {
    d.target = "anisotropic";
    d.h_grid = log_spaced(0.005, 0.16, 8);
    d.n_samples = 20000;
    d.n_replicates = 1;
    d.runs = {gmala_run(Kernel::q1), gmala_run(Kernel::q2)};
    if (id == "rejection_all") {
      d.runs.push_back(gmala_run(Kernel::q3));
      d.runs.push_back(ghmala_run("midpoint"));
    }
    return d;
  }
  if (id == "variance_anisotropic") {
    d.target = "anisotropic";
    d.observable = "indicator_tail_quadratic";
    d.h_grid = {0.02, 0.05, 0.1, 0.2};
    d.n_samples = 20000;
    d.n_replicates = 100;
    d.alpha = 3.0;
    d.burn_in_fraction = 0.5;
    d.runs = {mala_run(), gmala_run(Kernel::q2)};
    return d;
  }
  if (id == "variance_warped") {
    d.target = "warped_gaussian";
    d.h_grid = {0.05, 0.1, 0.2, 0.4};
    d.n_samples = 20000;
    d.n_replicates = 100;
    d.alpha = 2.0;
    d.burn_in_fraction = 0.5;
    d.truncation_radius = 50.0;
    d.runs = {mala_run(), gmala_run(Kernel::q2),
              ghmala_run("conjugated_midpoint")};
    return d;
  }
  if (id == "variance_quartic") {
    d.target = "quartic_gaussian";
    d.h_grid = {0.01, 0.05, 0.3, 1.5};
    d.n_samples = 20000;
    d.n_replicates = 100;
    d.alpha = 4.0;
    d.burn_in_fraction = 0.5;
    d.runs = {mala_run(), ghmala_run("explicit_splitting")};
    return d;
  }
  if (id == "custom") {
    d.h_grid = {};
    d.n_samples = 10000;
    d.n_replicates = 1;
    return d;
  }
  return std::nullopt;
}

struct FieldReader {
  const nlohmann::json& j;
  std::vector<std::string>& errors;

  bool has(const char* key) const { return j.contains(key); }

  void fail(const char* key, const std::string& msg) const {
    errors.push_back(std::string("$.") + key + ": " + msg);
  }

  std::string str(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    if (!j[key].is_string()) {
      fail(key, "expected a string");
      return fallback;
    }
    return j[key].get<std::string>();
  }

  double num(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (!j[key].is_number()) {
      fail(key, "expected a number");
      return fallback;
    }
    return j[key].get<double>();
  }

  long integer(const char* key, long fallback) const {
    if (!has(key)) return fallback;
    if (!j[key].is_number_integer()) {
      fail(key, "expected an integer");
      return fallback;
    }
    return j[key].get<long>();
  }
};

}  // namespace detail

inline const std::vector<std::string>& experiment_presets() {
  static const std::vector<std::string> ids = {
      "rejection_q1_vs_q2", "rejection_all",    "variance_anisotropic",
      "variance_warped",    "variance_quartic", "custom"};
  return ids;
}

/// Checks every field of the flat JSON config, filling preset defaults and
/// reporting all problems at once as "$.key: message" strings.
inline ValidationResult validate_config(const nlohmann::json& j) {
  ValidationResult result;
  auto& errors = result.errors;

  if (!j.is_object()) {
    errors.push_back("$: config must be a JSON object");
    return result;
  }

  static const std::vector<std::string> known = {
      "experiment",   "target",           "dim",
      "observable",   "sampler",          "kernel",
      "integrator",   "alpha",            "h_grid",
      "n_samples",    "n_replicates",     "burn_in_fraction",
      "master_seed",  "picard_tol",       "picard_max_iter",
      "truncation_radius", "initial_direction", "output_path"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      errors.push_back("$." + item.key() + ": unknown key");
  }

  detail::FieldReader read{j, errors};

  const std::string experiment = read.str("experiment", "");
  if (experiment.empty()) {
    errors.push_back("$.experiment: required field is missing");
    return result;
  }
  auto defaults = detail::preset_defaults(experiment);
  if (!defaults) {
    errors.push_back("$.experiment: unknown experiment '" + experiment + "'");
    return result;
  }

  ExperimentConfig cfg;
  cfg.experiment = experiment;
  const bool custom = experiment == "custom";

  if (custom && !read.has("target"))
    errors.push_back("$.target: required for the custom experiment");
  cfg.target = read.str("target", defaults->target);
  static const std::vector<std::string> target_ids = {
      "std_gaussian", "anisotropic", "warped_gaussian", "quartic_gaussian"};
  const bool target_known =
      std::find(target_ids.begin(), target_ids.end(), cfg.target) !=
      target_ids.end();
  if (!cfg.target.empty() && !target_known)
    errors.push_back("$.target: unknown target '" + cfg.target + "'");

  cfg.dim = static_cast<int>(read.integer("dim", 2));
  if (read.has("dim")) {
    if (cfg.target != "std_gaussian")
      errors.push_back("$.dim: only std_gaussian accepts a dimension");
    else if (cfg.dim < 1)
      errors.push_back("$.dim: must be at least 1");
  }

  cfg.observable = read.str("observable", defaults->observable);
  if (cfg.observable != "radius_squared" &&
      cfg.observable != "indicator_tail_quadratic")
    errors.push_back("$.observable: unknown observable '" + cfg.observable +
                     "'");

  // Sampler selection keys are only meaningful for custom experiments; the
  // presets pin their own run lists.
  for (const char* key : {"sampler", "kernel", "integrator"}) {
    if (!custom && read.has(key))
      errors.push_back("$." + std::string(key) +
                       ": only valid for the custom experiment");
  }
  if (custom) {
    const std::string sampler = read.str("sampler", "");
    const std::string kernel = read.str("kernel", "q2");
    const std::string integrator = read.str("integrator", "midpoint");
    if (sampler.empty()) {
      errors.push_back("$.sampler: required for the custom experiment");
    } else {
      try {
        RunSpec run;
        run.sampler = parse_sampler(sampler);
        if (run.sampler == SamplerKind::gmala) {
          run.kernel = parse_kernel(kernel);
          run.label = kernel_name(run.kernel);
        } else if (run.sampler == SamplerKind::ghmala) {
          if (integrator != "midpoint" && integrator != "conjugated_midpoint" &&
              integrator != "explicit_splitting")
            throw ConfigError("unknown integrator '" + integrator + "'");
          run.integrator = integrator;
          run.label = integrator;
        }
        cfg.runs = {run};
      } catch (const ConfigError& e) {
        errors.push_back(std::string("$.sampler: ") + e.what());
      }
    }
  } else {
    cfg.runs = defaults->runs;
  }

  cfg.alpha = read.num("alpha", defaults->alpha);
  if (!std::isfinite(cfg.alpha))
    errors.push_back("$.alpha: must be finite");

  if (read.has("h_grid")) {
    if (!j["h_grid"].is_array() || j["h_grid"].empty()) {
      errors.push_back("$.h_grid: expected a non-empty array of numbers");
    } else {
      for (const auto& v : j["h_grid"]) {
        if (!v.is_number()) {
          errors.push_back("$.h_grid: expected a non-empty array of numbers");
          cfg.h_grid.clear();
          break;
        }
        cfg.h_grid.push_back(v.get<double>());
      }
      for (std::size_t i = 0; i < cfg.h_grid.size(); ++i) {
        if (!(cfg.h_grid[i] > 0.0)) {
          errors.push_back("$.h_grid: step sizes must be positive");
          break;
        }
        if (i > 0 && !(cfg.h_grid[i] > cfg.h_grid[i - 1])) {
          errors.push_back("$.h_grid: step sizes must be strictly ascending");
          break;
        }
      }
    }
  } else if (custom) {
    errors.push_back("$.h_grid: required for the custom experiment");
  } else {
    cfg.h_grid = defaults->h_grid;
  }

  cfg.n_samples = read.integer("n_samples", defaults->n_samples);
  if (cfg.n_samples < 1)
    errors.push_back("$.n_samples: must be at least 1");

  cfg.n_replicates =
      static_cast<int>(read.integer("n_replicates", defaults->n_replicates));
  if (cfg.n_replicates < 1)
    errors.push_back("$.n_replicates: must be at least 1");
  if (experiment.rfind("variance_", 0) == 0 && cfg.n_replicates < 2)
    errors.push_back("$.n_replicates: variance experiments need at least 2");

  cfg.burn_in_fraction = read.num("burn_in_fraction", defaults->burn_in_fraction);
  if (!(cfg.burn_in_fraction >= 0.0) || !(cfg.burn_in_fraction < 1.0))
    errors.push_back("$.burn_in_fraction: must lie in [0, 1)");

  if (!read.has("master_seed")) {
    errors.push_back("$.master_seed: required field is missing");
  } else {
    const auto& seed = j["master_seed"];
    if (!seed.is_number_integer() ||
        (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      errors.push_back("$.master_seed: expected a non-negative integer");
    } else {
      cfg.master_seed = seed.get<std::uint64_t>();
    }
  }

  cfg.picard_tol = read.num("picard_tol", 1e-12);
  if (!(cfg.picard_tol > 0.0))
    errors.push_back("$.picard_tol: must be positive");
  cfg.picard_max_iter = static_cast<int>(read.integer("picard_max_iter", 100));
  if (cfg.picard_max_iter < 1)
    errors.push_back("$.picard_max_iter: must be at least 1");

  cfg.truncation_radius =
      read.num("truncation_radius", defaults->truncation_radius);
  if (cfg.truncation_radius < 0.0)
    errors.push_back("$.truncation_radius: must be non-negative (0 disables)");

  const long dir = read.integer("initial_direction", 1);
  if (dir != 1 && dir != -1)
    errors.push_back("$.initial_direction: must be +1 or -1");
  else
    cfg.initial_direction = static_cast<int>(dir);

  cfg.output_path = read.str("output_path", experiment + ".csv");
  if (cfg.output_path.empty())
    errors.push_back("$.output_path: must not be empty");

  // Capability checks: every run must be expressible on the chosen target.
  if (target_known) {
    const bool separable = cfg.target != "warped_gaussian";
    for (const RunSpec& run : cfg.runs) {
      if (run.sampler == SamplerKind::ghmala &&
          run.integrator == "explicit_splitting" && !separable)
        errors.push_back(
            "$.integrator: explicit_splitting needs a separable potential; '" +
            cfg.target + "' is not");
      if (run.sampler == SamplerKind::ghmala &&
          run.integrator == "conjugated_midpoint" &&
          cfg.target != "warped_gaussian")
        errors.push_back(
            "$.integrator: conjugated_midpoint has a shear preset only for "
            "warped_gaussian");
      if (run.sampler != SamplerKind::mala && cfg.target == "std_gaussian" &&
          cfg.dim != 2)
        errors.push_back(
            "$.dim: the rotation drift preset is two-dimensional");
    }
  }

  if (!errors.empty()) return result;
  result.config = std::move(cfg);
  return result;
}

/// Merges "key=value" strings into the JSON config. Values are parsed as
/// JSON when possible (numbers, arrays, booleans) and fall back to strings.
inline nlohmann::json apply_overrides(nlohmann::json j,
                                      const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto pos = item.find('=');
    if (pos == std::string::npos || pos == 0)
      throw ConfigError("override '" + item + "' is not of the form key=value");
    const std::string key = item.substr(0, pos);
    const std::string value = item.substr(pos + 1);
    const auto parsed = nlohmann::json::parse(value, nullptr, false);
    if (!parsed.is_discarded() && !parsed.is_null())
      j[key] = parsed;
    else
      j[key] = value;
  }
  return j;
}

}  // namespace liftmala
