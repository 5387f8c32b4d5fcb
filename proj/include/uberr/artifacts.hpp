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

#ifndef UBERR_ARTIFACTS_HPP_
#define UBERR_ARTIFACTS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uberr/calibration.hpp"
#include "uberr/cleaning.hpp"
#include "uberr/evaluation.hpp"
#include "uberr/selection.hpp"
#include "uberr/synthetic.hpp"
#include "uberr/ve_builder.hpp"

namespace uberr {

// Shortest text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string read_file(const std::string& path);
// Writes atomically through a temporary file in the same directory.
void write_file(const std::string& path, std::string_view content);

/// substation_id,timestamp,heat_power_kw,flow_m3h,supply_temp_c,return_temp_c
std::string measurements_csv(const SubstationMeasurements& m);
SubstationMeasurements parse_measurements_csv(std::string_view text);

/// timestamp,temp_c,ghi_wm2
std::string weather_csv(const WeatherSeries& w);
WeatherSeries parse_weather_csv(std::string_view text);

/// substation_id,timestamp,keep,reason
std::string mask_csv(const std::string& substation_id, Timestamp start, const CleaningMask& mask);
CleaningMask parse_mask_csv(std::string_view text);

/// substation_id,cal_start,val_start,season,weight,target_cvrmse,<features>
std::string ve_csv(const VEDataset& dataset);
nlohmann::json ve_sidecar(const VEDataset& dataset);
VEDataset parse_ve(std::string_view csv, const nlohmann::json& sidecar);

nlohmann::json to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BuildingParams& p);
BuildingParams building_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CalibrationResult& r);
CalibrationResult calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HeatingSeason& s);
HeatingSeason season_from_json(const nlohmann::json& j);

nlohmann::json feature_schema_json();

nlohmann::json to_json(const SelectionReport& r);
SelectionReport selection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TransformSpec& spec);
TransformSpec transform_spec_from_json(const nlohmann::json& j);

/// Kernel params, bounds, alpha, features, TransformSpec and the training
/// rows of `dataset_file` (identified by its SHA-256).
nlohmann::json model_json(const TrainedModel& model, const KernelBounds& bounds, const std::string& dataset_file,
                          const std::string& dataset_sha256, const Provenance& provenance);
/// Rebuilds and refactorizes the model from its artifact and dataset.
TrainedModel load_model(const nlohmann::json& j, const VEDataset& dataset);

// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace uberr

#endif  // UBERR_ARTIFACTS_HPP_
