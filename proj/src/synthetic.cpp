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

#include "uberr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

constexpr double kSecondsPerStep = 3600.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double day_of_year(Timestamp ts) {
  const Date d = date_of(ts);
  const std::chrono::year_month_day ymd{d};
  const Date jan1 = Date(ymd.year() / std::chrono::January / 1);
  return static_cast<double>((d - jan1).count()) + hour_of_day(ts) / 24.0;
}

struct WeatherSample {
  double t_out;
  double ghi;
};

WeatherSample weather_at(const WeatherSeries& w, std::size_t i) {
  const auto& t = w.temperature[i];
  const auto& g = w.ghi[i];
  if (!t || !g || !std::isfinite(*t) || !std::isfinite(*g)) {
    throw InputError("weather value at " + format_timestamp(w.temperature.time_at(i)) +
                     " is missing or non-finite");
  }
  return {*t, *g};
}

void check_weather(const WeatherSeries& w) {
  if (!w.temperature.aligned_with(w.ghi)) {
    throw InputError("weather temperature and GHI series are not aligned");
  }
  if (w.temperature.size() < 24) throw InputError("weather must cover at least 24 hours");
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::array<double, 24> make_dhw_profile() {
  std::array<double, 24> p = {0.010, 0.008, 0.007, 0.007, 0.008, 0.015, 0.045, 0.080,
                              0.075, 0.055, 0.045, 0.045, 0.050, 0.045, 0.035, 0.030,
                              0.035, 0.045, 0.060, 0.075, 0.075, 0.060, 0.040, 0.025};
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

WeatherSeries generate_weather(std::uint64_t seed, int days, Date start,
                               const WeatherConfig& cfg) {
  if (days < 7) throw InputError("weather generation needs at least 7 days");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> cloud(cfg.min_cloud_factor, 1.0);

  const std::size_t n = static_cast<std::size_t>(days) * 24;
  const Timestamp t0 = to_timestamp(start);
  std::vector<double> temp(n), ghi(n);

  const double stationary_sd = cfg.ar_sigma_c / std::sqrt(1.0 - cfg.ar_coefficient * cfg.ar_coefficient);
  double ar = stationary_sd * normal(rng);
  double cloud_factor = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp ts = t0 + std::chrono::hours(i);
    const int hour = hour_of_day(ts);
    const double doy = day_of_year(ts);
    if (hour == 0 || i == 0) cloud_factor = cloud(rng);

    ar = cfg.ar_coefficient * ar + cfg.ar_sigma_c * normal(rng);
    temp[i] = cfg.climate_mean_c -
              cfg.seasonal_amplitude_c * std::cos(kTwoPi * (doy - cfg.coldest_day_of_year) / 365.25) +
              cfg.diurnal_amplitude_c * std::cos(kTwoPi * (hour - 15) / 24.0) + ar;

    const double season = std::sin(kTwoPi * (std::floor(doy) - 80.0) / 365.25);
    const double day_length = 12.0 + cfg.day_length_amplitude_h * season;
    const double sunrise = 12.0 - day_length / 2.0;
    const double mid = hour + 0.5;
    double g = 0.0;
    if (mid > sunrise && mid < sunrise + day_length) {
      const double peak = cfg.ghi_peak_mean + cfg.ghi_peak_amplitude * season;
      g = peak * cloud_factor * std::sin(std::numbers::pi * (mid - sunrise) / day_length);
    }
    ghi[i] = std::max(0.0, g);
  }
  return {TimeSeries::dense(t0, temp, Unit::degC), TimeSeries::dense(t0, ghi, Unit::W_per_m2)};
}

void BuildingParams::validate() const {
  auto fail = [](const std::string& what) { throw InputError("invalid building parameters: " + what); };
  if (!(ua > 0)) fail("ua must be > 0");
  if (!(capacitance > 0)) fail("capacitance must be > 0");
  if (!(floor_area > 0)) fail("floor_area must be > 0");
  if (!(solar_aperture >= 0)) fail("solar_aperture must be >= 0");
  if (!(dhw_daily_kwh >= 0)) fail("dhw_daily_kwh must be >= 0");
  if (!(max_heat_power > 0)) fail("max_heat_power must be > 0");
  for (double sp : {setpoint_day, setpoint_night}) {
    if (!(sp >= 5.0 && sp <= 30.0)) fail("setpoints must lie within [5, 30] degC");
  }
  if (night_start < 0 || night_start > 23 || night_end < 0 || night_end > 23) {
    fail("night hours must be within [0, 23]");
  }
  // Explicit hourly stepping stays stable only when C/dt exceeds UA.
  if (!(capacitance / kSecondsPerStep > ua)) fail("time constant C/UA must exceed one hour");
}

double BuildingParams::setpoint_at(int hour) const {
  const bool night = night_start <= night_end ? (hour >= night_start && hour < night_end)
                                              : (hour >= night_start || hour < night_end);
  return night ? setpoint_night : setpoint_day;
}

const std::array<double, 24>& dhw_profile() {
  static const std::array<double, 24> profile = make_dhw_profile();
  return profile;
}

LoadTrace simulate_trace(const BuildingParams& p, const WeatherSeries& weather) {
  p.validate();
  check_weather(weather);
  const std::size_t n = weather.temperature.size();
  const double c_dt = p.capacitance / kSecondsPerStep;  // W/K
  const double q_max = p.max_heat_power * 1000.0;
  const auto& profile = dhw_profile();

  LoadTrace tr;
  tr.space_heating_kw.resize(n);
  tr.dhw_kw.resize(n);
  tr.solar_gain_kw.resize(n);
  tr.indoor_temp_c.resize(n);
  tr.total_kw.resize(n);

  double t_in = p.setpoint_at(hour_of_day(weather.temperature.start()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t_out, ghi] = weather_at(weather, i);
    const int hour = hour_of_day(weather.temperature.time_at(i));
    const double solar = p.solar_aperture * ghi;
    const double loss = p.ua * (t_in - t_out);
    const double demand = c_dt * (p.setpoint_at(hour) - t_in) + loss - solar;
    const double heat = std::clamp(demand, 0.0, q_max);
    tr.indoor_temp_c[i] = t_in;
    t_in += (heat + solar - loss) / c_dt;

    tr.space_heating_kw[i] = heat / 1000.0;
    tr.solar_gain_kw[i] = solar / 1000.0;
    tr.dhw_kw[i] = p.dhw_daily_kwh * profile[static_cast<std::size_t>(hour)];
    tr.total_kw[i] = tr.space_heating_kw[i] + tr.dhw_kw[i];
  }
  return tr;
}

TimeSeries simulate_load(const BuildingParams& params, const WeatherSeries& weather) {
  const LoadTrace tr = simulate_trace(params, weather);
  return TimeSeries::dense(weather.temperature.start(), tr.total_kw, Unit::kW);
}

double simulated_dhw_energy_kwh(const BuildingParams& params, int days) {
  const auto& profile = dhw_profile();
  double total = 0.0;
  for (int d = 0; d < days; ++d) {
    for (double share : profile) total += params.dhw_daily_kwh * share;
  }
  return total;
}

LoadTrace simulate_truth(const BuildingParams& p, const StructuralMismatch& m,
                         const WeatherSeries& weather, std::uint64_t seed) {
  if (m.is_zero()) return simulate_trace(p, weather);
  p.validate();
  check_weather(weather);
  if (!(m.mass_fraction >= 0.0 && m.mass_fraction < 1.0)) {
    throw InputError("mass_fraction must lie in [0, 1)");
  }

  const std::size_t n = weather.temperature.size();
  const bool two_node = m.mass_fraction > 0.0;
  const double ca_dt = p.capacitance * (1.0 - m.mass_fraction) / kSecondsPerStep;
  const double cm_dt = p.capacitance * m.mass_fraction / kSecondsPerStep;
  const double h_am = two_node ? m.mass_coupling_ratio * p.ua : 0.0;
  const double ua_peak = p.ua * (1.0 + std::abs(m.ua_nonlinearity) * 3.0);
  if (!(ca_dt > ua_peak + h_am) || (two_node && !(cm_dt > h_am))) {
    throw InputError("generator building is too light for hourly stepping");
  }
  const double q_max = p.max_heat_power * 1000.0;
  const double design_w = p.ua * m.reference_delta_t;
  const auto& profile = dhw_profile();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double phi = m.occupancy_persistence;
  const double phi_d = m.occupancy_daily_persistence;
  const double spread = m.occupancy_daily_spread;
  double z = normal(rng);
  double log_day = spread * normal(rng);
  double day_multiplier = std::exp(log_day - 0.5 * spread * spread);

  LoadTrace tr;
  tr.space_heating_kw.resize(n);
  tr.dhw_kw.resize(n);
  tr.solar_gain_kw.resize(n);
  tr.indoor_temp_c.resize(n);
  tr.total_kw.resize(n);

  double t_air = p.setpoint_at(hour_of_day(weather.temperature.start()));
  double t_mass = t_air;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t_out, ghi] = weather_at(weather, i);
    const int hour = hour_of_day(weather.temperature.time_at(i));
    if (hour == 0 && i > 0) {
      log_day = phi_d * log_day + std::sqrt(1.0 - phi_d * phi_d) * spread * normal(rng);
      day_multiplier = std::exp(log_day - 0.5 * spread * spread);
    }
    z = phi * z + std::sqrt(1.0 - phi * phi) * normal(rng);
    const double occupancy = m.occupancy_intensity * day_multiplier * z * design_w;

    const double solar = p.solar_aperture * ghi;
    const double solar_air = two_node ? 0.5 * solar : solar;
    const double solar_mass = solar - solar_air;
    const double dt_env = t_air - t_out;
    const double ua_eff =
        p.ua * std::max(0.2, 1.0 + m.ua_nonlinearity * (dt_env - m.reference_delta_t) / m.reference_delta_t);
    const double loss = std::min(ua_eff, ua_peak) * dt_env;
    const double to_mass = h_am * (t_air - t_mass);
    const double demand = ca_dt * (p.setpoint_at(hour) - t_air) + loss + to_mass - solar_air + occupancy;
    const double heat = std::clamp(demand, 0.0, q_max);

    tr.indoor_temp_c[i] = t_air;
    t_air += (heat - occupancy + solar_air - loss - to_mass) / ca_dt;
    if (two_node) t_mass += (to_mass + solar_mass) / cm_dt;

    tr.space_heating_kw[i] = heat / 1000.0;
    tr.solar_gain_kw[i] = solar / 1000.0;
    tr.dhw_kw[i] = p.dhw_daily_kwh * profile[static_cast<std::size_t>(hour)];
    tr.total_kw[i] = tr.space_heating_kw[i] + tr.dhw_kw[i];
  }
  return tr;
}

DistrictScenario make_scenario(const ScenarioConfig& cfg) {
  if (cfg.days < 7) throw InputError("scenario must span at least 7 days");
  if (cfg.substations < 1) throw InputError("scenario needs at least one substation");

  DistrictScenario sc;
  sc.seed = cfg.seed;
  sc.weather = generate_weather(derive_seed(cfg.seed, 0), cfg.days, cfg.start, cfg.weather);
  sc.seasons = default_seasons(cfg.start, cfg.start + std::chrono::days(cfg.days - 1));

  const std::size_t n_slots = static_cast<std::size_t>(cfg.days) * 24;
  const double weeks = cfg.days / 7.0;
  const int bill_year = static_cast<int>(std::chrono::year_month_day{cfg.start}.year());

  for (int s = 0; s < cfg.substations; ++s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

    SubstationSpec spec;
    char id[16];
    std::snprintf(id, sizeof(id), "S%02d", s + 1);
    spec.id = id;
    spec.seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(s));

    BuildingParams& b = spec.truth;
    b.floor_area = uniform(2000.0, 8000.0);
    const double ua_intensity = uniform(0.4, 1.6);  // W/(K m2)
    b.ua = ua_intensity * b.floor_area;
    b.capacitance = uniform(1.5e5, 3.0e5) * b.floor_area;
    b.setpoint_day = uniform(19.0, 22.0);
    b.setpoint_night = b.setpoint_day - uniform(0.0, 2.0);
    b.night_start = 21 + static_cast<int>(uniform(0.0, 3.0));
    b.night_end = 5 + static_cast<int>(uniform(0.0, 3.0));
    b.solar_aperture = uniform(0.01, 0.05) * b.floor_area;
    b.dhw_daily_kwh = uniform(0.02, 0.05) * b.floor_area;
    b.max_heat_power = b.ua * 25.0 / 1000.0;

    if (!cfg.perfect_surrogate) {
      spec.mismatch.mass_fraction = cfg.mass_fraction;
      spec.mismatch.ua_nonlinearity = cfg.ua_nonlinearity * uniform(0.5, 1.5);
      spec.mismatch.occupancy_intensity = cfg.occupancy_intensity * uniform(0.3, 1.7);
      spec.noise.multiplicative = cfg.multiplicative_noise;
      spec.noise.additive_kw = cfg.additive_noise * b.ua * 15.0 / 1000.0;

      auto poisson = [&](double rate) {
        std::poisson_distribution<int> pd(rate * weeks);
        return pd(rng);
      };
      auto place = [&](AnomalyKind kind, std::size_t length, double factor) {
        if (length + 48 >= n_slots) return;
        for (int attempt = 0; attempt < 100; ++attempt) {
          const auto start = static_cast<std::size_t>(uniform(24.0, static_cast<double>(n_slots - length - 24)));
          const bool clash = std::any_of(spec.anomalies.begin(), spec.anomalies.end(), [&](const Anomaly& a) {
            return start < a.start + a.length + 24 && a.start < start + length + 24;
          });
          if (!clash) {
            spec.anomalies.push_back({kind, start, length, factor});
            return;
          }
        }
      };
      const int spikes = poisson(cfg.spike_rate);
      const int stucks = poisson(cfg.stuck_rate);
      const int dropouts = poisson(cfg.dropout_rate);
      for (int k = 0; k < dropouts; ++k) place(AnomalyKind::dropout, static_cast<std::size_t>(uniform(4.0, 37.0)), 0.0);
      for (int k = 0; k < stucks; ++k) place(AnomalyKind::stuck, static_cast<std::size_t>(uniform(6.0, 25.0)), 0.0);
      for (int k = 0; k < spikes; ++k) place(AnomalyKind::spike, 1, uniform(8.0, 12.0));
      std::sort(spec.anomalies.begin(), spec.anomalies.end(),
                [](const Anomaly& a, const Anomaly& b) { return a.start < b.start; });
    }

    const double bill_noise = cfg.perfect_surrogate ? 0.0 : cfg.bill_noise;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (unsigned month = 6; month <= 9; ++month) {
      const int days = static_cast<int>(
          (Date(std::chrono::year{bill_year} / std::chrono::month{month + 1} / 1) -
           Date(std::chrono::year{bill_year} / std::chrono::month{month} / 1)).count());
      spec.nonheating_bills.push_back(
          {days, simulated_dhw_energy_kwh(b, days) * (1.0 + bill_noise * normal(rng))});
    }
    sc.substations.push_back(std::move(spec));
  }
  return sc;
}

TimeSeries true_load(const DistrictScenario& sc, std::size_t index) {
  const auto& spec = sc.substations.at(index);
  const LoadTrace tr = simulate_truth(spec.truth, spec.mismatch, sc.weather, spec.seed);
  return TimeSeries::dense(sc.weather.temperature.start(), tr.total_kw, Unit::kW);
}

SubstationMeasurements synthesize_substation(const DistrictScenario& sc, std::size_t index) {
  const auto& spec = sc.substations.at(index);
  const LoadTrace tr = simulate_truth(spec.truth, spec.mismatch, sc.weather, spec.seed);
  const std::size_t n = tr.total_kw.size();
  const double design_kw = spec.truth.ua * 15.0 / 1000.0;

  std::mt19937_64 rng(derive_seed(spec.seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> power(n), flow(n), supply(n), ret(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = tr.total_kw[i];
    if (spec.noise.multiplicative != 0.0 || spec.noise.additive_kw != 0.0) {
      p = p * (1.0 + spec.noise.multiplicative * normal(rng)) + spec.noise.additive_kw * normal(rng);
      p = std::max(0.0, p);
    }
    const double t_out = *sc.weather.temperature[i];
    power[i] = p;
    supply[i] = std::clamp(72.0 - 0.5 * t_out, 60.0, 85.0);
    const double delta = std::clamp(12.0 + 15.0 * p / design_kw, 8.0, 35.0);
    ret[i] = supply[i] - delta;
    flow[i] = p / (kWaterHeatCapacity * delta);
  }

  std::vector<std::optional<double>> p_out(power.begin(), power.end());
  std::vector<std::optional<double>> f_out(flow.begin(), flow.end());
  std::vector<std::optional<double>> s_out(supply.begin(), supply.end());
  std::vector<std::optional<double>> r_out(ret.begin(), ret.end());
  for (const Anomaly& a : spec.anomalies) {
    if (a.start >= n) continue;
    const std::size_t stop = std::min(n, a.start + a.length);
    switch (a.kind) {
      case AnomalyKind::dropout:
        for (std::size_t i = a.start; i < stop; ++i) p_out[i] = f_out[i] = s_out[i] = r_out[i] = std::nullopt;
        break;
      case AnomalyKind::stuck:
        for (std::size_t i = a.start; i < stop; ++i) p_out[i] = power[a.start];
        break;
      case AnomalyKind::spike: {
        const std::size_t lo = a.start >= 84 ? a.start - 84 : 0;
        const std::size_t hi = std::min(n, a.start + 84);
        const double med = median_of({power.begin() + static_cast<std::ptrdiff_t>(lo),
                                      power.begin() + static_cast<std::ptrdiff_t>(hi)});
        for (std::size_t i = a.start; i < stop; ++i) p_out[i] = a.factor * std::max(med, 1.0);
        break;
      }
    }
  }

  const Timestamp t0 = sc.weather.temperature.start();
  return {spec.id, TimeSeries(t0, std::move(p_out), Unit::kW), TimeSeries(t0, std::move(f_out), Unit::m3_per_h),
          TimeSeries(t0, std::move(s_out), Unit::degC), TimeSeries(t0, std::move(r_out), Unit::degC)};
}

std::map<std::string, SubstationMeasurements> synthesize_measurements(const DistrictScenario& sc) {
  std::map<std::string, SubstationMeasurements> out;
  for (std::size_t i = 0; i < sc.substations.size(); ++i) {
    auto m = synthesize_substation(sc, i);
    out.emplace(m.id, std::move(m));
  }
  return out;
}

}  // namespace uberr
