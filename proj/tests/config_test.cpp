#include "liftmala/config.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <string>
#include <vector>

using liftmala::ConfigError;
using liftmala::ExperimentConfig;
using liftmala::Kernel;
using liftmala::SamplerKind;
using liftmala::ValidationResult;
using nlohmann::json;

namespace {

bool has_error_containing(const ValidationResult& r, const std::string& needle) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const std::string& e) {
                       return e.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST(ValidateConfig, PresetFillsDefaults) {
  const auto r = liftmala::validate_config(
      json{{"experiment", "rejection_q1_vs_q2"}, {"master_seed", 1}});
  ASSERT_TRUE(r.ok()) << (r.errors.empty() ? "" : r.errors.front());
  const ExperimentConfig& cfg = *r.config;
  EXPECT_EQ(cfg.target, "anisotropic");
  EXPECT_EQ(cfg.observable, "radius_squared");
  ASSERT_EQ(cfg.h_grid.size(), 8u);
  EXPECT_DOUBLE_EQ(cfg.h_grid.front(), 0.005);
  EXPECT_DOUBLE_EQ(cfg.h_grid.back(), 0.16);
  EXPECT_EQ(cfg.n_samples, 20000);
  EXPECT_EQ(cfg.n_replicates, 1);
  EXPECT_DOUBLE_EQ(cfg.alpha, 1.0);
  EXPECT_DOUBLE_EQ(cfg.burn_in_fraction, 0.1);
  EXPECT_EQ(cfg.master_seed, 1u);
  EXPECT_EQ(cfg.output_path, "rejection_q1_vs_q2.csv");
  ASSERT_EQ(cfg.runs.size(), 2u);
  EXPECT_EQ(cfg.runs[0].sampler, SamplerKind::gmala);
  EXPECT_EQ(cfg.runs[0].kernel, Kernel::q1);
  EXPECT_EQ(cfg.runs[1].label, "q2");
  EXPECT_EQ(cfg.burn_in(), 2000);
}

TEST(ValidateConfig, PresetRunLists) {
  const auto all = liftmala::validate_config(
      json{{"experiment", "rejection_all"}, {"master_seed", 3}});
  ASSERT_TRUE(all.ok());
  ASSERT_EQ(all.config->runs.size(), 4u);
  EXPECT_EQ(all.config->runs[3].integrator, "midpoint");

  const auto warped = liftmala::validate_config(
      json{{"experiment", "variance_warped"}, {"master_seed", 3}});
  ASSERT_TRUE(warped.ok());
  EXPECT_EQ(warped.config->target, "warped_gaussian");
  EXPECT_DOUBLE_EQ(warped.config->truncation_radius, 50.0);
  ASSERT_EQ(warped.config->runs.size(), 3u);
  EXPECT_EQ(warped.config->runs[0].label, "-");
  EXPECT_EQ(warped.config->runs[2].label, "conjugated_midpoint");
  EXPECT_DOUBLE_EQ(warped.config->alpha, 2.0);
  EXPECT_DOUBLE_EQ(warped.config->burn_in_fraction, 0.5);
  EXPECT_EQ(warped.config->h_grid, (std::vector<double>{0.05, 0.1, 0.2, 0.4}));

  const auto quartic = liftmala::validate_config(
      json{{"experiment", "variance_quartic"}, {"master_seed", 3}});
  ASSERT_TRUE(quartic.ok());
  EXPECT_EQ(quartic.config->runs[1].integrator, "explicit_splitting");
  EXPECT_DOUBLE_EQ(quartic.config->alpha, 4.0);
  EXPECT_EQ(quartic.config->h_grid, (std::vector<double>{0.01, 0.05, 0.3, 1.5}));

  const auto aniso = liftmala::validate_config(
      json{{"experiment", "variance_anisotropic"}, {"master_seed", 3}});
  ASSERT_TRUE(aniso.ok());
  EXPECT_DOUBLE_EQ(aniso.config->alpha, 3.0);
  EXPECT_DOUBLE_EQ(aniso.config->burn_in_fraction, 0.5);
  EXPECT_EQ(aniso.config->burn_in(), 10000);
}

TEST(ValidateConfig, MissingSeedNamesTheField) {
  const auto r =
      liftmala::validate_config(json{{"experiment", "rejection_all"}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.master_seed"));
  EXPECT_TRUE(has_error_containing(r, "missing"));
}

TEST(ValidateConfig, UnknownAndMistypedKeys) {
  const auto r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                               {"master_seed", 1},
                                               {"bogus_knob", 3},
                                               {"alpha", "large"},
                                               {"n_samples", 2.5}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.bogus_knob: unknown key"));
  EXPECT_TRUE(has_error_containing(r, "$.alpha: expected a number"));
  EXPECT_TRUE(has_error_containing(r, "$.n_samples: expected an integer"));
}

TEST(ValidateConfig, SeedMustBeNonNegativeInteger) {
  auto r = liftmala::validate_config(
      json{{"experiment", "rejection_all"}, {"master_seed", -4}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.master_seed"));
  r = liftmala::validate_config(
      json{{"experiment", "rejection_all"}, {"master_seed", 1.5}});
  EXPECT_FALSE(r.ok());
}

TEST(ValidateConfig, StepGridRules) {
  auto r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                          {"master_seed", 1},
                                          {"h_grid", {0.1, 0.05}}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.h_grid"));
  EXPECT_TRUE(has_error_containing(r, "ascending"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"h_grid", {0.0, 0.1}}});
  EXPECT_TRUE(has_error_containing(r, "positive"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"h_grid", json::array()}});
  EXPECT_FALSE(r.ok());

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"h_grid", {0.1, "broken"}}});
  EXPECT_FALSE(r.ok());
}

TEST(ValidateConfig, CustomCollectsAllMissingFields) {
  const auto r =
      liftmala::validate_config(json{{"experiment", "custom"}, {"master_seed", 9}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.target"));
  EXPECT_TRUE(has_error_containing(r, "$.sampler"));
  EXPECT_TRUE(has_error_containing(r, "$.h_grid"));
  EXPECT_GE(r.errors.size(), 3u);
}

TEST(ValidateConfig, CustomHappyPath) {
  const auto r = liftmala::validate_config(json{{"experiment", "custom"},
                                                {"master_seed", 9},
                                                {"target", "std_gaussian"},
                                                {"sampler", "gmala"},
                                                {"kernel", "q3"},
                                                {"h_grid", {0.05, 0.1}},
                                                {"n_samples", 500},
                                                {"alpha", 0.5}});
  ASSERT_TRUE(r.ok()) << r.errors.front();
  ASSERT_EQ(r.config->runs.size(), 1u);
  EXPECT_EQ(r.config->runs[0].sampler, SamplerKind::gmala);
  EXPECT_EQ(r.config->runs[0].kernel, Kernel::q3);
  EXPECT_EQ(r.config->output_path, "custom.csv");
}

TEST(ValidateConfig, CapabilityRules) {
  // splitting needs a separable potential
  auto r = liftmala::validate_config(json{{"experiment", "custom"},
                                          {"master_seed", 1},
                                          {"target", "warped_gaussian"},
                                          {"sampler", "ghmala"},
                                          {"integrator", "explicit_splitting"},
                                          {"h_grid", {0.1}}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "separable"));

  // the conjugating shear only exists for the warped target
  r = liftmala::validate_config(json{{"experiment", "custom"},
                                     {"master_seed", 1},
                                     {"target", "anisotropic"},
                                     {"sampler", "ghmala"},
                                     {"integrator", "conjugated_midpoint"},
                                     {"h_grid", {0.1}}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "conjugated_midpoint"));

  // lifted samplers need the planar rotation drift
  r = liftmala::validate_config(json{{"experiment", "custom"},
                                     {"master_seed", 1},
                                     {"target", "std_gaussian"},
                                     {"dim", 4},
                                     {"sampler", "gmala"},
                                     {"h_grid", {0.1}}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "two-dimensional"));

  // but plain MALA is dimension-agnostic
  r = liftmala::validate_config(json{{"experiment", "custom"},
                                     {"master_seed", 1},
                                     {"target", "std_gaussian"},
                                     {"dim", 4},
                                     {"sampler", "mala"},
                                     {"h_grid", {0.1}}});
  EXPECT_TRUE(r.ok());

  // dim is reserved for the Gaussian preset
  r = liftmala::validate_config(json{{"experiment", "custom"},
                                     {"master_seed", 1},
                                     {"target", "anisotropic"},
                                     {"dim", 3},
                                     {"sampler", "mala"},
                                     {"h_grid", {0.1}}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.dim"));
}

TEST(ValidateConfig, SamplerKeysRejectedOutsideCustom) {
  const auto r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                                {"master_seed", 1},
                                                {"sampler", "mala"}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.sampler"));
  EXPECT_TRUE(has_error_containing(r, "custom"));
}

TEST(ValidateConfig, RangeChecks) {
  auto r = liftmala::validate_config(json{{"experiment", "custom"},
                                          {"master_seed", 1},
                                          {"target", "std_gaussian"},
                                          {"sampler", "mala"},
                                          {"h_grid", {0.1}},
                                          {"n_samples", 0}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.n_samples"));

  r = liftmala::validate_config(json{{"experiment", "variance_anisotropic"},
                                     {"master_seed", 1},
                                     {"n_replicates", 1}});
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_error_containing(r, "$.n_replicates"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"burn_in_fraction", 1.0}});
  EXPECT_TRUE(has_error_containing(r, "$.burn_in_fraction"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"initial_direction", 0}});
  EXPECT_TRUE(has_error_containing(r, "$.initial_direction"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"picard_tol", 0.0}});
  EXPECT_TRUE(has_error_containing(r, "$.picard_tol"));

  r = liftmala::validate_config(json{{"experiment", "rejection_all"},
                                     {"master_seed", 1},
                                     {"truncation_radius", -2.0}});
  EXPECT_TRUE(has_error_containing(r, "$.truncation_radius"));

  r = liftmala::validate_config(json{{"experiment", "nonsense"},
                                     {"master_seed", 1}});
  EXPECT_TRUE(has_error_containing(r, "$.experiment"));
}

TEST(ApplyOverrides, ParsesTypedValues) {
  json base{{"experiment", "rejection_all"}, {"master_seed", 1}};
  const json merged = liftmala::apply_overrides(
      base, {"master_seed=42", "target=warped_gaussian", "h_grid=[0.1,0.2]",
             "alpha=2.5"});
  EXPECT_EQ(merged["master_seed"], 42);
  EXPECT_EQ(merged["target"], "warped_gaussian");
  ASSERT_TRUE(merged["h_grid"].is_array());
  EXPECT_DOUBLE_EQ(merged["h_grid"][1].get<double>(), 0.2);
  EXPECT_DOUBLE_EQ(merged["alpha"].get<double>(), 2.5);

  EXPECT_THROW(liftmala::apply_overrides(base, {"no_equals_sign"}),
               ConfigError);
  EXPECT_THROW(liftmala::apply_overrides(base, {"=5"}), ConfigError);
}

TEST(ExperimentPresets, ListsAllSix) {
  const auto& ids = liftmala::experiment_presets();
  EXPECT_EQ(ids.size(), 6u);
  for (const std::string& id : ids) {
    json cfg{{"experiment", id}, {"master_seed", 1}};
    if (id == "custom") {
      cfg["target"] = "std_gaussian";
      cfg["sampler"] = "mala";
      cfg["h_grid"] = {0.1};
    }
    EXPECT_TRUE(liftmala::validate_config(cfg).ok()) << id;
  }
}
