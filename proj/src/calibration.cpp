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

#include "uberr/calibration.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "uberr/errors.hpp"
#include "uberr/features.hpp"

namespace uberr {

void ParamRanges::validate() const {
  for (const ParamRange* r : {&ua, &capacitance, &setpoint_day, &setpoint_night, &solar_aperture, &dhw_daily_kwh}) {
    if (!(r->low <= r->high)) throw InputError("parameter range has low > high");
  }
}

ParamRanges ParamRanges::defaults_for(double floor_area) { return RangeSpec{}.for_area(floor_area); }

ParamRanges RangeSpec::for_area(double floor_area) const {
  auto scaled = [&](const ParamRange& r) { return ParamRange{r.low * floor_area, r.high * floor_area}; };
  ParamRanges r;
  r.ua = scaled(ua_per_m2);
  r.capacitance = scaled(capacitance_per_m2);
  r.setpoint_day = setpoint_day;
  r.setpoint_night = setpoint_night;
  r.solar_aperture = scaled(aperture_per_m2);
  r.dhw_daily_kwh = scaled(dhw_per_m2);
  r.validate();
  return r;
}

std::vector<BuildingParams> sample_params(const ParamRanges& ranges, int n, std::uint64_t seed,
                                          const BuildingParams& base) {
  if (n < 1) throw InputError("sample_params needs n >= 1");
  ranges.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto draw = [&](const ParamRange& r) { return r.low + (r.high - r.low) * u01(rng); };
  std::vector<BuildingParams> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    BuildingParams p = base;
    p.ua = draw(ranges.ua);
    p.capacitance = draw(ranges.capacitance);
    p.setpoint_day = draw(ranges.setpoint_day);
    p.setpoint_night = draw(ranges.setpoint_night);
    p.solar_aperture = draw(ranges.solar_aperture);
    p.dhw_daily_kwh = draw(ranges.dhw_daily_kwh);
    out.push_back(p);
  }
  return out;
}

BuildingParams calibrate_dhw(std::span<const MonthlyBill> bills, const BuildingParams& candidate) {
  if (bills.empty()) throw CalibrationError("DHW calibration needs at least one non-heating bill");
  double observed = 0.0, simulated = 0.0;
  for (const auto& b : bills) {
    observed += b.energy_kwh;
    simulated += simulated_dhw_energy_kwh(candidate, b.days);
  }
  observed /= static_cast<double>(bills.size());
  simulated /= static_cast<double>(bills.size());
  if (simulated == 0.0) {
    if (observed == 0.0) return candidate;
    throw CalibrationError("candidate has no DHW draw but the bills are non-zero");
  }
  BuildingParams out = candidate;
  out.dhw_daily_kwh = candidate.dhw_daily_kwh * (observed / simulated);
  return out;
}

std::size_t select_best(std::span<const double> errors) {
  std::size_t best = errors.size();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!std::isfinite(errors[i])) continue;
    if (best == errors.size() || errors[i] < errors[best]) best = i;
  }
  if (best == errors.size()) throw CalibrationError("no candidate produced a finite error");
  return best;
}

std::vector<CalibrationResult> calibrate_windows(const TimeSeries& measured, const WeatherSeries& weather,
                                                 std::span<const CalendarWindow> windows,
                                                 std::span<const BuildingParams> candidates,
                                                 std::span<const MonthlyBill> bills,
                                                 std::size_t max_missing_slots) {
  if (candidates.empty()) throw CalibrationError("empty candidate list");
  if (!measured.aligned_with(weather.temperature)) {
    throw InputError("measurements and weather must cover the same hours");
  }

  struct Target {
    CalendarWindow window;
    TimeSeries measured;
    std::vector<double> errors;
  };
  std::vector<Target> targets;
  for (const auto& w : windows) {
    TimeSeries m = slice(measured, w);
    if (m.missing_count() > max_missing_slots) continue;
    targets.push_back({w, std::move(m), std::vector<double>(candidates.size(), std::numeric_limits<double>::infinity())});
  }
  if (targets.empty()) return {};

  std::vector<BuildingParams> stage1(candidates.begin(), candidates.end());
  for (std::size_t k = 0; k < stage1.size(); ++k) {
    TimeSeries sim;
    try {
      stage1[k] = calibrate_dhw(bills, stage1[k]);
      sim = simulate_load(stage1[k], weather);
    } catch (const InputError&) {
      continue;  // implausible candidate, stays at +inf
    } catch (const CalibrationError&) {
      continue;
    }
    for (auto& t : targets) {
      try {
        t.errors[k] = cvrmse(t.measured, slice(sim, t.window));
      } catch (const UndefinedMetric& e) {
        throw CalibrationError(std::string("calibration window ") + format_date(t.window.start) + ": " + e.what());
      }
    }
  }

  std::vector<CalibrationResult> out;
  for (const auto& t : targets) {
    const std::size_t best = select_best(t.errors);
    CalibrationResult r;
    r.window = t.window;
    r.selected_params = stage1[best];
    r.calibration_error = t.errors[best];
    r.candidate_count = static_cast<int>(candidates.size());
    r.selected_index = static_cast<int>(best);
    out.push_back(std::move(r));
  }
  return out;
}

CalibrationResult calibrate_window(const TimeSeries& measured, const WeatherSeries& weather,
                                   const CalendarWindow& window, std::span<const BuildingParams> candidates,
                                   std::span<const MonthlyBill> bills, std::size_t max_missing_slots) {
  if (slice(measured, window).missing_count() > max_missing_slots) {
    throw CalibrationError("calibration window " + format_date(window.start) +
                           " has more than one day of missing data");
  }
  const CalendarWindow ws[] = {window};
  auto res = calibrate_windows(measured, weather, ws, candidates, bills, max_missing_slots);
  return res.front();
}

CalibrationResult calibrate_window(const TimeSeries& measured, const WeatherSeries& weather,
                                   const CalendarWindow& window, const ParamRanges& ranges,
                                   const BuildingParams& base, std::span<const MonthlyBill> bills,
                                   const CalibrationConfig& config) {
  const auto candidates = sample_params(ranges, config.candidates, config.seed, base);
  return calibrate_window(measured, weather, window, candidates, bills, config.max_missing_slots);
}

}  // namespace uberr
