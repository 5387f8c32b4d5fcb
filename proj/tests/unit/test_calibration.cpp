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

#include <gtest/gtest.h>

#include <cmath>

#include "uberr/calibration.hpp"
#include "uberr/errors.hpp"
#include "uberr/features.hpp"

namespace uberr {
namespace {

TEST(SampleParams, DegenerateRangesPinTheValue) {
  ParamRanges r;
  r.ua = {1234.0, 1234.0};
  r.capacitance = {5e8, 5e8};
  r.setpoint_day = {21.0, 21.0};
  r.setpoint_night = {17.0, 17.0};
  r.solar_aperture = {12.0, 12.0};
  r.dhw_daily_kwh = {80.0, 80.0};
  const auto p = sample_params(r, 1, 9);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].ua, 1234.0);
  EXPECT_EQ(p[0].capacitance, 5e8);
  EXPECT_EQ(p[0].setpoint_day, 21.0);
  EXPECT_EQ(p[0].setpoint_night, 17.0);
  EXPECT_EQ(p[0].solar_aperture, 12.0);
  EXPECT_EQ(p[0].dhw_daily_kwh, 80.0);
}

TEST(SampleParams, DeterministicAndPrefixStable) {
  const auto r = ParamRanges::defaults_for(4000.0);
  const auto a = sample_params(r, 50, 17);
  const auto b = sample_params(r, 50, 17);
  const auto c = sample_params(r, 80, 17);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], c[i]);
  EXPECT_THROW(sample_params(r, 0, 1), InputError);
}

TEST(SampleParams, MonteCarloBoundsAndMidpoint) {
  const auto r = ParamRanges::defaults_for(4000.0);
  const auto p = sample_params(r, 10000, 23);
  auto check = [&](const ParamRange& range, auto get) {
    double lo = 1e300, hi = -1e300, mean = 0.0;
    for (const auto& q : p) {
      const double v = get(q);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= static_cast<double>(p.size());
    EXPECT_GE(lo, range.low);
    EXPECT_LE(hi, range.high);
    const double mid = 0.5 * (range.low + range.high);
    EXPECT_NEAR(mean, mid, 0.05 * mid);
  };
  check(r.ua, [](const BuildingParams& q) { return q.ua; });
  check(r.capacitance, [](const BuildingParams& q) { return q.capacitance; });
  check(r.setpoint_day, [](const BuildingParams& q) { return q.setpoint_day; });
  check(r.setpoint_night, [](const BuildingParams& q) { return q.setpoint_night; });
  check(r.solar_aperture, [](const BuildingParams& q) { return q.solar_aperture; });
  check(r.dhw_daily_kwh, [](const BuildingParams& q) { return q.dhw_daily_kwh; });
}

TEST(Ranges, LowAboveHighRejected) {
  RangeSpec s;
  s.ua_per_m2 = {2.0, 1.0};
  EXPECT_THROW(s.for_area(100.0), InputError);
}

TEST(Dhw, FixedPointAndLinearity) {
  BuildingParams p;
  const std::vector<MonthlyBill> same = {{30, simulated_dhw_energy_kwh(p, 30)}, {31, simulated_dhw_energy_kwh(p, 31)}};
  EXPECT_NEAR(calibrate_dhw(same, p).dhw_daily_kwh, p.dhw_daily_kwh, 1e-12 * p.dhw_daily_kwh);
  const std::vector<MonthlyBill> twice = {{30, 2.0 * simulated_dhw_energy_kwh(p, 30)}};
  EXPECT_NEAR(calibrate_dhw(twice, p).dhw_daily_kwh, 2.0 * p.dhw_daily_kwh, 1e-12 * p.dhw_daily_kwh);
}

TEST(Dhw, RandomCandidateMatchesBillsAfterCalibration) {
  const auto sc = make_scenario(ScenarioConfig{});
  const auto cands = sample_params(ParamRanges::defaults_for(3000.0), 20, 4);
  for (const auto& c : cands) {
    const auto& bills = sc.substations[0].nonheating_bills;
    const auto q = calibrate_dhw(bills, c);
    double obs = 0.0, sim = 0.0;
    for (const auto& b : bills) {
      obs += b.energy_kwh;
      sim += simulated_dhw_energy_kwh(q, b.days);
    }
    EXPECT_NEAR(sim, obs, 1e-9 * obs);
  }
}

TEST(Dhw, Errors) {
  BuildingParams p;
  p.dhw_daily_kwh = 0.0;
  const std::vector<MonthlyBill> bills = {{30, 100.0}};
  EXPECT_THROW(calibrate_dhw(bills, p), CalibrationError);
  EXPECT_THROW(calibrate_dhw({}, BuildingParams{}), CalibrationError);
}

TEST(SelectBest, ArgminAndTies) {
  const double e[] = {0.3, 0.1, 0.2};
  EXPECT_EQ(select_best(e), 1u);
  const double tie[] = {0.5, 0.2, 0.2};
  EXPECT_EQ(select_best(tie), 1u);
  const double bad[] = {std::nan(""), std::nan("")};
  EXPECT_THROW(select_best(bad), CalibrationError);
}

struct PerfectCase {
  DistrictScenario sc;
  SubstationMeasurements m;
  CalendarWindow window;
};

PerfectCase perfect_case() {
  ScenarioConfig cfg;
  cfg.substations = 2;
  cfg.perfect_surrogate = true;
  auto sc = make_scenario(cfg);
  auto m = synthesize_substation(sc, 0);
  return {std::move(sc), std::move(m), CalendarWindow{cfg.start + std::chrono::days(14)}};
}

TEST(CalibrateWindow, RecoversPlantedTruth) {
  const auto c = perfect_case();
  const auto& spec = c.sc.substations[0];
  auto cands = sample_params(ParamRanges::defaults_for(spec.truth.floor_area), 30, 5, spec.truth);
  cands.insert(cands.begin() + 11, spec.truth);
  const auto r = calibrate_window(c.m.heat_power, c.sc.weather, c.window, cands, spec.nonheating_bills);
  EXPECT_LT(r.calibration_error, 1e-9);
  EXPECT_EQ(r.selected_index, 11);
  EXPECT_EQ(r.candidate_count, 31);
}

TEST(CalibrateWindow, ArgminOverCandidatesAndSupersetMonotone) {
  const auto sc = make_scenario(ScenarioConfig{});
  const auto m = synthesize_substation(sc, 3);
  const auto& spec = sc.substations[3];
  const auto ranges = ParamRanges::defaults_for(spec.truth.floor_area);
  const CalendarWindow w{make_date(2021, 2, 22)};
  const auto small = sample_params(ranges, 20, 8, spec.truth);
  const auto large = sample_params(ranges, 60, 8, spec.truth);
  const auto rs = calibrate_window(m.heat_power, sc.weather, w, small, spec.nonheating_bills);
  const auto rl = calibrate_window(m.heat_power, sc.weather, w, large, spec.nonheating_bills);
  EXPECT_LE(rl.calibration_error, rs.calibration_error);
  EXPECT_GE(rs.calibration_error, 0.0);
  for (const auto& cand : small) {
    const auto q = calibrate_dhw(spec.nonheating_bills, cand);
    const double e = cvrmse(slice(m.heat_power, w), slice(simulate_load(q, sc.weather), w));
    EXPECT_LE(rs.calibration_error, e);
  }
}

TEST(CalibrateWindow, Errors) {
  const auto c = perfect_case();
  const auto& spec = c.sc.substations[0];
  EXPECT_THROW(calibrate_window(c.m.heat_power, c.sc.weather, c.window, std::span<const BuildingParams>{},
                                spec.nonheating_bills),
               CalibrationError);
  std::vector<std::optional<double>> v(c.m.heat_power.values().begin(), c.m.heat_power.values().end());
  const std::size_t first = *c.m.heat_power.index_of(to_timestamp(c.window.start));
  for (std::size_t i = first; i < first + 30; ++i) v[i].reset();
  const TimeSeries holes(c.m.heat_power.start(), v, Unit::kW);
  const std::vector<BuildingParams> one = {spec.truth};
  EXPECT_THROW(calibrate_window(holes, c.sc.weather, c.window, one, spec.nonheating_bills), CalibrationError);
}

}  // namespace
}  // namespace uberr
