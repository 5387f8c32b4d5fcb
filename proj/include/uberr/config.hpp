/*
 * Copyright 2026 The uberr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UBERR_CONFIG_HPP_
#define UBERR_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uberr/calibration.hpp"
#include "uberr/cleaning.hpp"
#include "uberr/evaluation.hpp"
#include "uberr/features.hpp"
#include "uberr/grid.hpp"
#include "uberr/selection.hpp"
#include "uberr/synthetic.hpp"
#include "uberr/ve_builder.hpp"

namespace uberr {

struct EvalSettings {
  std::vector<std::size_t> sizes{250, 500, 1000, 1500, 2000, 2500, 3000};
  std::size_t k_min = 1;
  std::size_t k_max = 9;
  std::size_t n = 1500;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string split = "both";  // interpolation | extrapolation | both
};

struct RunConfig {
  ScenarioConfig scenario;
  CleaningConfig cleaning;
  CalibrationConfig calibration;
  VEConfig ve;
  std::vector<HeatingSeason> seasons;  // empty: Oct 1 - May 31 seasons over the record
  FeatureConfig features;
  TransformConfig transforms;
  SelectionConfig select;
  ModelConfig model;
  std::size_t model_features = 5;  // features of the trained model
  bool model_includes_curve_feature = true;
  std::size_t train_n = 1500;
  EvalSettings eval;
  GridConfig grid;
};

/// Parses INI text ("[section]" headers, "key = value" lines, '#' or ';'
/// comments). Unknown sections or keys and invalid values throw InputError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Overrides from variables named UBERR_<SECTION>_<KEY>; returns the names used.
std::vector<std::string> apply_env_overrides(RunConfig& config);

/// Every key with its current value; parse_config(canonical_text(c)) == c.
std::string canonical_text(const RunConfig& config);
/// Generated reference of all keys, defaults and meanings.
std::string config_reference();

std::string sha256_hex(std::string_view data);
std::string config_hash(const RunConfig& config);

// Seasons from the config, or the default ones covering the scenario record.
std::vector<HeatingSeason> effective_seasons(const RunConfig& config);

}  // namespace uberr

#endif  // UBERR_CONFIG_HPP_
