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

#include "uberr/ve_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "uberr/errors.hpp"

namespace uberr {

using std::chrono::days;

std::vector<CalendarWindow> enumerate_windows(Date span_start, Date span_end, WindowMode mode) {
  if ((span_end - span_start).count() < 7) throw InputError("window span must cover at least 7 days");
  const int stride = mode == WindowMode::calibration ? 7 : 1;
  std::vector<CalendarWindow> out;
  for (Date d = span_start; d + days(7) <= span_end; d += days(stride)) out.push_back({d, 7});
  return out;
}

std::vector<VEPair> build_pairs(const std::string& substation_id, const TimeSeries& cleaned,
                                std::span<const CalendarWindow> cal, std::span<const CalendarWindow> val,
                                std::span<const HeatingSeason> seasons, std::size_t max_missing_slots) {
  auto usable = [&](const CalendarWindow& w) {
    try {
      return slice(cleaned, w).missing_count() <= max_missing_slots;
    } catch (const RangeError&) {
      return false;
    }
  };
  std::vector<bool> val_ok;
  for (const auto& v : val) val_ok.push_back(usable(v));

  std::vector<VEPair> out;
  for (const auto& c : cal) {
    const HeatingSeason* season = season_of(seasons, c);
    if (season == nullptr || !usable(c)) continue;
    for (std::size_t j = 0; j < val.size(); ++j) {
      if (!val_ok[j] || !season->covers(val[j])) continue;
      out.push_back({substation_id, c, val[j], season->label});
    }
  }
  return out;
}

std::size_t VEDataset::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return i;
  }
  throw InputError("dataset has no feature '" + std::string(name) + "'");
}

std::vector<double> VEDataset::column(std::string_view name) const {
  std::vector<std::size_t> rows(samples.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return column(name, rows);
}

std::vector<double> VEDataset::column(std::string_view name, std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  if (name == "target_cvrmse") {
    for (auto r : rows) out.push_back(samples.at(r).target_cvrmse);
    return out;
  }
  const std::size_t k = feature_index(name);
  for (auto r : rows) out.push_back(samples.at(r).features[k]);
  return out;
}

std::vector<double> VEDataset::weights(std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(samples.at(r).weight);
  return out;
}

std::vector<std::string> VEDataset::substations() const {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.pair.substation_id);
  return {ids.begin(), ids.end()};
}

void VEDataset::validate() const {
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size()) throw InputError("duplicate feature names");
  double total = 0.0;
  for (const auto& s : samples) {
    if (s.features.size() != feature_names.size()) throw InputError("sample feature count mismatch");
    for (double v : s.features) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value");
    }
    if (!(s.target_cvrmse >= 0.0) || !std::isfinite(s.target_cvrmse)) throw InputError("invalid target");
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) throw InputError("invalid weight");
    if (s.pair.calibration.length_days != 7 || s.pair.validation.length_days != 7) {
      throw InputError("VE windows must be 7 days");
    }
    total += s.weight;
  }
  const double n = static_cast<double>(samples.size());
  if (!samples.empty() && std::abs(total - n) > 1e-9 * n) throw InputError("weights do not sum to the sample count");
}

std::vector<VESample> compute_weights(std::vector<VESample> samples) {
  if (samples.empty()) return samples;
  std::map<Date, int> freq;
  for (const auto& s : samples) {
    for (int d = 0; d < s.pair.validation.length_days; ++d) ++freq[s.pair.validation.start + days(d)];
  }
  double total = 0.0;
  for (auto& s : samples) {
    double raw = 0.0;
    for (int d = 0; d < s.pair.validation.length_days; ++d) raw += 1.0 / freq[s.pair.validation.start + days(d)];
    s.weight = raw;
    total += raw;
  }
  const double scale = static_cast<double>(samples.size()) / total;
  for (auto& s : samples) s.weight *= scale;
  return samples;
}

std::vector<CalibrationResult> calibrate_district(const DistrictData& data, const CalibrationConfig& config,
                                                  const VEConfig& ve) {
  const Date first = date_of(data.weather.temperature.start());
  const Date last = date_of(data.weather.temperature.end() - std::chrono::hours(1)) + days(1);
  const auto windows = enumerate_windows(first, last, WindowMode::calibration);

  std::vector<CalibrationResult> out;
  for (std::size_t s = 0; s < data.substations.size(); ++s) {
    const auto& sub = data.substations[s];
    std::vector<CalendarWindow> in_season;
    for (const auto& w : windows) {
      if (season_of(data.seasons, w) != nullptr) in_season.push_back(w);
    }
    auto candidates = sample_params(config.ranges.for_area(sub.metadata.floor_area), config.candidates,
                                    derive_seed(config.seed, s), sub.metadata);
    candidates.insert(candidates.end(), sub.extra_candidates.begin(), sub.extra_candidates.end());
    try {
      auto res = calibrate_windows(sub.cleaned_load, data.weather, in_season, candidates, sub.nonheating_bills,
                                   ve.max_missing_slots);
      for (auto& r : res) {
        r.substation_id = sub.id;
        out.push_back(std::move(r));
      }
    } catch (const CalibrationError& e) {
      spdlog::warn("substation {}: calibration failed: {}", sub.id, e.what());
    }
  }
  return out;
}

VEBuildResult build_dataset(const DistrictData& data, std::span<const CalibrationResult> calibrations,
                            const FeatureConfig& features, const VEConfig& ve, const Provenance& provenance) {
  const Date first = date_of(data.weather.temperature.start());
  const Date last = date_of(data.weather.temperature.end() - std::chrono::hours(1)) + days(1);
  const auto cal_windows = enumerate_windows(first, last, WindowMode::calibration);
  const auto val_windows = enumerate_windows(first, last, WindowMode::validation);

  VEBuildResult out;
  out.dataset.feature_names = feature_names();
  out.dataset.provenance = provenance;
  std::vector<VESample> samples;

  for (const auto& sub : data.substations) {
    std::map<Date, const CalibrationResult*> calibrated;
    for (const auto& c : calibrations) {
      if (c.substation_id == sub.id) calibrated[c.window.start] = &c;
    }
    std::map<Date, TimeSeries> simulated;
    const FeatureInputs inputs{sub.cleaned_load, data.weather, sub.metadata.floor_area};

    for (const auto& pair : build_pairs(sub.id, sub.cleaned_load, cal_windows, val_windows, data.seasons,
                                        ve.max_missing_slots)) {
      const std::string tag = sub.id + " cal " + format_date(pair.calibration.start) + " val " +
                              format_date(pair.validation.start);
      auto it = calibrated.find(pair.calibration.start);
      if (it == calibrated.end()) {
        out.skipped.push_back(tag + ": no calibrated model");
        continue;
      }
      try {
        auto sim = simulated.find(pair.calibration.start);
        if (sim == simulated.end()) {
          sim = simulated.emplace(pair.calibration.start, simulate_load(it->second->selected_params, data.weather)).first;
        }
        VESample s;
        s.pair = pair;
        s.target_cvrmse = cvrmse(slice(sub.cleaned_load, pair.validation), slice(sim->second, pair.validation));
        s.features = extract_features(pair, inputs, features).values;
        samples.push_back(std::move(s));
      } catch (const std::exception& e) {
        out.skipped.push_back(tag + ": " + e.what());
      }
    }
  }
  for (const auto& s : out.skipped) spdlog::debug("skipped VE {}", s);
  if (!out.skipped.empty()) spdlog::info("{} VE pairs skipped", out.skipped.size());

  out.dataset.samples = compute_weights(std::move(samples));
  return out;
}

VEDataset without_substation(const VEDataset& dataset, const std::string& substation_id) {
  VEDataset out;
  out.feature_names = dataset.feature_names;
  out.provenance = dataset.provenance;
  std::vector<VESample> kept;
  for (const auto& s : dataset.samples) {
    if (s.pair.substation_id != substation_id) kept.push_back(s);
  }
  out.samples = compute_weights(std::move(kept));
  return out;
}

}  // namespace uberr
