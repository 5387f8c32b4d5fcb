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

#ifndef UBERR_CALIBRATION_HPP_
#define UBERR_CALIBRATION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uberr/series.hpp"
#include "uberr/synthetic.hpp"

namespace uberr {

struct ParamRange {
  double low = 0.0;
  double high = 0.0;
};

/// Sampling bounds for the calibratable subset of BuildingParams. Floor area,
/// night hours and plant size are taken from the building metadata instead.
struct ParamRanges {
  ParamRange ua;
  ParamRange capacitance;
  ParamRange setpoint_day;
  ParamRange setpoint_night;
  ParamRange solar_aperture;
  ParamRange dhw_daily_kwh;

  // Throws InputError when low > high. Degenerate ranges pin the value.
  void validate() const;
  // Per-m2 plausible ranges scaled by the floor area.
  static ParamRanges defaults_for(double floor_area);
};

/// n independent uniform draws per field, fields drawn in declaration order so
/// that a larger n with the same seed extends the same candidate list.
std::vector<BuildingParams> sample_params(const ParamRanges& ranges, int n, std::uint64_t seed,
                                          const BuildingParams& base = {});

/// Rescales dhw_daily_kwh so the simulated non-heating monthly DHW energy
/// matches the mean observed bill. DHW energy is linear in dhw_daily_kwh.
BuildingParams calibrate_dhw(std::span<const MonthlyBill> bills, const BuildingParams& candidate);

/// Area-normalized ranges; setpoints are absolute.
struct RangeSpec {
  ParamRange ua_per_m2{0.3, 2.0};
  ParamRange capacitance_per_m2{1.2e5, 3.5e5};
  ParamRange setpoint_day{18.0, 23.0};
  ParamRange setpoint_night{15.0, 22.0};
  ParamRange aperture_per_m2{0.0, 0.08};
  ParamRange dhw_per_m2{0.01, 0.08};

  ParamRanges for_area(double floor_area) const;
};

struct CalibrationResult {
  std::string substation_id;
  CalendarWindow window;
  BuildingParams selected_params;
  double calibration_error = 0.0;  // CV(RMSE)
  int candidate_count = 0;
  int selected_index = 0;
};

// Index of the smallest finite error; ties go to the lowest index.
std::size_t select_best(std::span<const double> errors);

struct CalibrationConfig {
  int candidates = 1000;
  std::uint64_t seed = 7;
  std::size_t max_missing_slots = 24;
  RangeSpec ranges;
};

/// Two-stage brute force on explicit candidates: DHW from bills, then the
/// CV(RMSE) argmin over the window. Each candidate is simulated from the start
/// of the weather record so the interior state is warmed up.
CalibrationResult calibrate_window(const TimeSeries& measured, const WeatherSeries& weather,
                                   const CalendarWindow& window,
                                   std::span<const BuildingParams> candidates,
                                   std::span<const MonthlyBill> bills,
                                   std::size_t max_missing_slots = 24);

CalibrationResult calibrate_window(const TimeSeries& measured, const WeatherSeries& weather,
                                   const CalendarWindow& window, const ParamRanges& ranges,
                                   const BuildingParams& base, std::span<const MonthlyBill> bills,
                                   const CalibrationConfig& config = {});

/// Same selection for several windows at once, simulating every candidate only
/// once. Windows failing the missing-data rule are left out of the result.
std::vector<CalibrationResult> calibrate_windows(const TimeSeries& measured,
                                                 const WeatherSeries& weather,
                                                 std::span<const CalendarWindow> windows,
                                                 std::span<const BuildingParams> candidates,
                                                 std::span<const MonthlyBill> bills,
                                                 std::size_t max_missing_slots = 24);

}  // namespace uberr

#endif  // UBERR_CALIBRATION_HPP_
