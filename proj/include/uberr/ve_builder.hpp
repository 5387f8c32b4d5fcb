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

#ifndef UBERR_VE_BUILDER_HPP_
#define UBERR_VE_BUILDER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uberr/calibration.hpp"
#include "uberr/features.hpp"
#include "uberr/series.hpp"
#include "uberr/synthetic.hpp"
#include "uberr/ve_pair.hpp"

namespace uberr {

enum class WindowMode { calibration, validation };

/// 7-day windows anchored at `span_start` and ending by `span_end`
/// (exclusive): weekly stride for calibration, daily stride for validation.
std::vector<CalendarWindow> enumerate_windows(Date span_start, Date span_end, WindowMode mode);

/// Same-season Cartesian pairing. Windows of `cleaned` with more than
/// `max_missing_slots` missing hours are dropped along with all their pairs.
std::vector<VEPair> build_pairs(const std::string& substation_id, const TimeSeries& cleaned,
                                std::span<const CalendarWindow> calibration_windows,
                                std::span<const CalendarWindow> validation_windows,
                                std::span<const HeatingSeason> seasons,
                                std::size_t max_missing_slots = 24);

struct VESample {
  VEPair pair;
  std::vector<double> features;  // raw, in VEDataset::feature_names order
  double target_cvrmse = 0.0;
  double weight = 1.0;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version = UBERR_VERSION;
};

struct VEDataset {
  std::vector<std::string> feature_names;
  std::vector<VESample> samples;
  Provenance provenance;

  std::size_t size() const { return samples.size(); }
  std::size_t feature_index(std::string_view name) const;
  // Raw feature column, or the target when name == "target_cvrmse".
  std::vector<double> column(std::string_view name) const;
  std::vector<double> column(std::string_view name, std::span<const std::size_t> rows) const;
  std::vector<double> weights(std::span<const std::size_t> rows) const;
  std::vector<std::string> substations() const;  // sorted, unique
  // Throws InputError on any broken dataset invariant.
  void validate() const;
};

/// Per-date frequencies over the validation windows of all samples;
/// raw weight = sum of 1/freq over the sample's dates, then rescaled so the
/// weights sum to the sample count.
std::vector<VESample> compute_weights(std::vector<VESample> samples);

struct SubstationData {
  std::string id;
  TimeSeries cleaned_load;  // kW, aligned with the weather
  BuildingParams metadata;  // floor area, night hours and plant size are used
  std::vector<MonthlyBill> nonheating_bills;
  // Appended after the sampled candidates (lets tests plant the truth).
  std::vector<BuildingParams> extra_candidates;
};

struct DistrictData {
  WeatherSeries weather;
  std::vector<SubstationData> substations;
  std::vector<HeatingSeason> seasons;
};

struct VEConfig {
  std::size_t max_missing_slots = 24;
};

/// Calibrates every eligible weekly window of every substation.
std::vector<CalibrationResult> calibrate_district(const DistrictData& data, const CalibrationConfig& config,
                                                  const VEConfig& ve = {});

struct VEBuildResult {
  VEDataset dataset;
  std::vector<std::string> skipped;  // "<pair>: <reason>"
};

/// Simulates each validation window with the model calibrated on its paired
/// calibration window, then attaches target, features and weights.
VEBuildResult build_dataset(const DistrictData& data, std::span<const CalibrationResult> calibrations,
                            const FeatureConfig& features, const VEConfig& ve, const Provenance& provenance);

// Drops the samples of one substation and renormalizes the weights.
VEDataset without_substation(const VEDataset& dataset, const std::string& substation_id);

}  // namespace uberr

#endif  // UBERR_VE_BUILDER_HPP_
