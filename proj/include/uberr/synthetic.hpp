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

#ifndef UBERR_SYNTHETIC_HPP_
#define UBERR_SYNTHETIC_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uberr/series.hpp"

namespace uberr {

// Deterministic child seed for an independent random stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct WeatherSeries {
  TimeSeries temperature;  // degC
  TimeSeries ghi;          // W/m2
};

struct WeatherConfig {
  double climate_mean_c = 13.8;
  double seasonal_amplitude_c = 8.0;
  double coldest_day_of_year = 20.0;
  double diurnal_amplitude_c = 4.0;
  // Hourly AR(1) weather noise.
  double ar_coefficient = 0.985;
  double ar_sigma_c = 0.45;
  // Clear-sky noon irradiance, annual mean and seasonal swing.
  double ghi_peak_mean = 650.0;
  double ghi_peak_amplitude = 250.0;
  double day_length_amplitude_h = 3.5;
  double min_cloud_factor = 0.2;
};

/// Seasonal + diurnal sinusoid with AR(1) noise for temperature, half-sine
/// clear-sky irradiance times a daily cloud factor for GHI. Starts at midnight
/// UTC of `start`. Bit-identical for a given seed.
WeatherSeries generate_weather(std::uint64_t seed, int days, Date start,
                               const WeatherConfig& config = {});

/// Calibratable building description used by both the generator and the
/// surrogate model. Powers are W/K or kW as named.
struct BuildingParams {
  double ua = 5000.0;               // W/K
  double capacitance = 1.0e9;       // J/K
  double floor_area = 5000.0;       // m2
  double setpoint_day = 20.0;       // degC
  double setpoint_night = 18.0;     // degC
  int night_start = 22;             // hour of day, inclusive
  int night_end = 6;                // hour of day, exclusive
  double solar_aperture = 100.0;    // m2
  double dhw_daily_kwh = 150.0;     // kWh/day
  double max_heat_power = 400.0;    // kW

  void validate() const;
  double setpoint_at(int hour) const;
  bool operator==(const BuildingParams&) const = default;
};

// Normalized 24-hour domestic hot water draw profile (sums to 1).
const std::array<double, 24>& dhw_profile();

struct LoadTrace {
  std::vector<double> space_heating_kw;
  std::vector<double> dhw_kw;
  std::vector<double> solar_gain_kw;
  std::vector<double> indoor_temp_c;
  std::vector<double> total_kw;
};

/// Single-node RC surrogate stepped hourly with an ideal thermostat:
///   heat = clamp(C (T_set - T_in)/dt + UA (T_in - T_out) - solar, 0, max)
///   C (T_in' - T_in)/dt = heat + solar - UA (T_in - T_out)
/// In steady state at the setpoint this reduces to UA (T_set - T_out) - solar.
LoadTrace simulate_trace(const BuildingParams& params, const WeatherSeries& weather);
TimeSeries simulate_load(const BuildingParams& params, const WeatherSeries& weather);

// DHW energy of `days` full days, summed hour by hour.
double simulated_dhw_energy_kwh(const BuildingParams& params, int days);

/// What the "true" buildings have that the surrogate lacks.
struct StructuralMismatch {
  double mass_fraction = 0.0;        // share of capacitance in a second (mass) node
  double mass_coupling_ratio = 2.0;  // air-mass conductance as a multiple of UA
  double ua_nonlinearity = 0.0;      // relative UA change per reference delta T
  double reference_delta_t = 15.0;   // K
  double occupancy_intensity = 0.0;  // noise amplitude as a fraction of design load
  double occupancy_persistence = 0.8;
  double occupancy_daily_spread = 0.8;
  double occupancy_daily_persistence = 0.7;

  bool is_zero() const {
    return mass_fraction == 0.0 && ua_nonlinearity == 0.0 && occupancy_intensity == 0.0;
  }
};

/// Generator model: two-node RC with temperature-dependent losses and an
/// occupancy-like stochastic load. Identical to simulate_trace when the
/// mismatch is zero.
LoadTrace simulate_truth(const BuildingParams& params, const StructuralMismatch& mismatch,
                         const WeatherSeries& weather, std::uint64_t seed);

enum class AnomalyKind { stuck, spike, dropout };

struct Anomaly {
  AnomalyKind kind = AnomalyKind::spike;
  std::size_t start = 0;   // slot index
  std::size_t length = 1;  // slots
  double factor = 10.0;    // spike height over the local 7-day median
};

struct MonthlyBill {
  int days = 30;
  double energy_kwh = 0.0;
};

struct MeasurementNoise {
  double multiplicative = 0.0;  // relative std
  double additive_kw = 0.0;     // absolute std
};

struct SubstationSpec {
  std::string id;
  BuildingParams truth;
  StructuralMismatch mismatch;
  MeasurementNoise noise;
  std::vector<Anomaly> anomalies;
  std::vector<MonthlyBill> nonheating_bills;
  std::uint64_t seed = 0;
};

struct DistrictScenario {
  std::uint64_t seed = 0;
  WeatherSeries weather;
  std::vector<SubstationSpec> substations;
  std::vector<HeatingSeason> seasons;
};

struct ScenarioConfig {
  std::uint64_t seed = 2021;
  Date start = make_date(2021, 2, 8);
  int days = 49;
  int substations = 15;
  double multiplicative_noise = 0.02;
  double additive_noise = 0.005;   // fraction of design load
  double spike_rate = 0.3;         // events per substation-week
  double stuck_rate = 0.15;
  double dropout_rate = 0.15;
  double occupancy_intensity = 0.12;
  double ua_nonlinearity = 0.35;
  double mass_fraction = 0.6;
  double bill_noise = 0.02;
  // Generator equals the surrogate and measurements are noise/anomaly free.
  bool perfect_surrogate = false;
  WeatherConfig weather;
};

DistrictScenario make_scenario(const ScenarioConfig& config);

struct SubstationMeasurements {
  std::string id;
  TimeSeries heat_power;   // kW
  TimeSeries flow;         // m3/h
  TimeSeries supply_temp;  // degC
  TimeSeries return_temp;  // degC
};

// Clean generator output for one substation (no noise, no anomalies).
TimeSeries true_load(const DistrictScenario& scenario, std::size_t index);

/// Measured = true load x (1 + multiplicative noise) + additive noise, then the
/// anomaly schedule is planted. Flow and temperatures are derived from the
/// pre-anomaly power so they stay hydraulically consistent.
SubstationMeasurements synthesize_substation(const DistrictScenario& scenario, std::size_t index);
std::map<std::string, SubstationMeasurements> synthesize_measurements(
    const DistrictScenario& scenario);

// Water rho * c_p in kWh/(m3 K).
inline constexpr double kWaterHeatCapacity = 1.16;

}  // namespace uberr

#endif  // UBERR_SYNTHETIC_HPP_
