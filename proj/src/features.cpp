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

#include "uberr/features.hpp"

#include <algorithm>
#include <cmath>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

struct BaseFeature {
  const char* name;
  const char* gap_name;
  const char* unit;
  FeatureGroup group;
};

// Order here fixes the column order of every VE dataset.
constexpr BaseFeature kBaseFeatures[] = {
    {"power_variation", "power_variation_gap", "%", FeatureGroup::energy_use},
    {"median_power_per_m2", "median_power_per_m2_gap", "kW/m2", FeatureGroup::energy_use},
    {"thermoception", "thermoception_gap", "1", FeatureGroup::energy_use},
    {"min_power", "min_power_gap", "kW", FeatureGroup::energy_use},
    {"mean_power", "mean_power_gap", "kW", FeatureGroup::energy_use},
    {"median_power", "median_power_gap", "kW", FeatureGroup::energy_use},
    {"max_power", "max_power_gap", "kW", FeatureGroup::energy_use},
    {"max_temperature", "max_temp_gap", "degC", FeatureGroup::boundary},
    {"min_temperature", "min_temperature_gap", "degC", FeatureGroup::boundary},
    {"mean_temperature", "mean_temperature_gap", "degC", FeatureGroup::boundary},
    {"median_temperature", "median_temperature_gap", "degC", FeatureGroup::boundary},
    {"temperature_variation", "temp_var_gap", "degC", FeatureGroup::boundary},
    {"hdd", "hdd_gap", "degC*day", FeatureGroup::boundary},
    {"mean_ghi", "ghi_gap", "W/m2", FeatureGroup::boundary},
    {"max_ghi", "max_ghi_gap", "W/m2", FeatureGroup::boundary},
};
constexpr std::size_t kBaseCount = std::size(kBaseFeatures);

std::vector<FeatureInfo> build_schema() {
  std::vector<FeatureInfo> out;
  for (const auto& b : kBaseFeatures) out.push_back({b.name, b.unit, b.group});
  for (const auto& b : kBaseFeatures) out.push_back({b.gap_name, b.unit, FeatureGroup::cv});
  out.push_back({"time_gap", "day", FeatureGroup::cv});
  return out;
}

}  // namespace

double cvrmse(const TimeSeries& measured, const TimeSeries& simulated) {
  if (measured.size() != simulated.size()) throw InputError("cvrmse needs aligned series");
  double sq = 0.0, sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (!measured[i] || !simulated[i]) continue;
    const double d = *simulated[i] - *measured[i];
    sq += d * d;
    sum += *measured[i];
    ++n;
  }
  if (n == 0) throw UndefinedMetric("cvrmse: no common non-missing slot");
  const double mean = sum / static_cast<double>(n);
  if (!(mean > 0.0)) throw UndefinedMetric("cvrmse: mean measured value is not positive");
  return std::sqrt(sq / static_cast<double>(n)) / mean;
}

LoadWindow LoadWindow::from_series(const TimeSeries& series) {
  if (series.size() % 24 != 0 || series.empty()) {
    throw InputError("a load window must span whole days");
  }
  LoadWindow w;
  w.hourly.assign(series.values().begin(), series.values().end());
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t d = 0; d < series.size() / 24; ++d) {
    double s = 0.0;
    int c = 0;
    for (std::size_t h = 0; h < 24; ++h) {
      if (const auto& v = series[d * 24 + h]) {
        s += *v;
        ++c;
      }
    }
    w.daily.push_back(c > 0 ? std::optional<double>(s / c) : std::nullopt);
    total += s;
    n += static_cast<std::size_t>(c);
  }
  w.weekly_mean = n > 0 ? total / static_cast<double>(n) : 0.0;
  return w;
}

std::string_view to_string(GaMode mode) {
  return mode == GaMode::day_matched ? "day_matched" : "literal_double_sum";
}

GaMode parse_ga_mode(std::string_view text) {
  if (text == "day_matched") return GaMode::day_matched;
  if (text == "literal_double_sum") return GaMode::literal_double_sum;
  throw InputError("unknown G_a mode '" + std::string(text) + "'");
}

double ga_weekly(const LoadWindow& w, GaMode mode) {
  if (!(w.weekly_mean > 0.0)) throw UndefinedMetric("G_a: weekly mean load is not positive");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < w.hourly.size(); ++i) {
    if (!w.hourly[i]) continue;
    ++n;
    if (mode == GaMode::day_matched) {
      acc += std::abs(*w.hourly[i] - *w.daily[i / 24]);
    } else {
      for (std::size_t j = 0; j < w.hourly.size(); ++j) {
        if (w.hourly[j]) acc += std::abs(*w.hourly[i] - *w.daily[j / 24]);
      }
    }
  }
  return 0.5 * acc / (w.weekly_mean * static_cast<double>(n)) * 100.0;
}

double hdd(std::span<const double> daily_mean_temp, double base) {
  double total = 0.0;
  for (double t : daily_mean_temp) total += std::max(0.0, base - t);
  return total;
}

double mean_abs_deviation(const TimeSeries& series) {
  const auto v = series.present_values();
  if (v.empty()) throw InputError("mean_abs_deviation of an all-missing series");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double mad = 0.0;
  for (double x : v) mad += std::abs(x - mean);
  return mad / static_cast<double>(v.size());
}

double thermoception(const LoadWindow& load, const TimeSeries& temperature) {
  if (load.hourly.size() != temperature.size()) throw InputError("thermoception needs aligned windows");
  if (!(load.weekly_mean > 0.0)) throw UndefinedMetric("thermoception: mean load is not positive");
  double num = 0.0;
  std::size_t n = 0;
  for (const auto& p : load.hourly) {
    if (!p) continue;
    num += std::abs(*p - load.weekly_mean);
    ++n;
  }
  num /= static_cast<double>(n) * load.weekly_mean;
  const double den = mean_abs_deviation(temperature);
  if (!(den > 0.0)) throw UndefinedMetric("thermoception: temperature variation is zero");
  return num / den;
}

WindowStats window_stats(std::span<const double> values) {
  if (values.empty()) throw InputError("window_stats of an all-missing window");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  return {v.front(), sum / static_cast<double>(v.size()), v[(v.size() - 1) / 2], v.back()};
}

WindowStats window_stats(const TimeSeries& series) { return window_stats(series.present_values()); }

std::string_view to_string(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::energy_use: return "energy_use";
    case FeatureGroup::boundary: return "boundary";
    case FeatureGroup::cv: return "cv";
  }
  return "";
}

FeatureGroup parse_feature_group(std::string_view text) {
  for (auto g : {FeatureGroup::energy_use, FeatureGroup::boundary, FeatureGroup::cv}) {
    if (to_string(g) == text) return g;
  }
  throw InputError("unknown feature group '" + std::string(text) + "'");
}

const std::vector<FeatureInfo>& feature_schema() {
  static const std::vector<FeatureInfo> schema = build_schema();
  return schema;
}

std::vector<std::string> feature_names() {
  std::vector<std::string> out;
  for (const auto& f : feature_schema()) out.push_back(f.name);
  return out;
}

const FeatureInfo& feature_info(std::string_view name) {
  for (const auto& f : feature_schema()) {
    if (f.name == name) return f;
  }
  throw InputError("unknown feature '" + std::string(name) + "'");
}

double FeatureVector::at(std::string_view name) const {
  const auto& schema = feature_schema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return values.at(i);
  }
  throw InputError("unknown feature '" + std::string(name) + "'");
}

std::vector<double> window_features(const CalendarWindow& window, const FeatureInputs& in,
                                    const FeatureConfig& cfg) {
  const TimeSeries load = slice(in.load, window);
  const TimeSeries temp = slice(in.weather.temperature, window);
  const TimeSeries ghi = slice(in.weather.ghi, window);
  const LoadWindow lw = LoadWindow::from_series(load);

  const WindowStats p = window_stats(load);
  const WindowStats t = window_stats(temp);
  const WindowStats g = window_stats(ghi);
  std::vector<double> daily_t;
  for (const auto& d : daily_mean(temp)) {
    if (d.value) daily_t.push_back(*d.value);
  }

  std::vector<double> out = {
      ga_weekly(lw, cfg.ga_mode),
      p.median / in.floor_area,
      thermoception(lw, temp),
      p.min,
      p.mean,
      p.median,
      p.max,
      t.max,
      t.min,
      t.mean,
      t.median,
      mean_abs_deviation(temp),
      hdd(daily_t, cfg.hdd_base_c),
      g.mean,
      g.max,
  };
  for (double v : out) {
    if (!std::isfinite(v)) throw UndefinedMetric("non-finite window feature");
  }
  return out;
}

FeatureVector extract_features(const VEPair& pair, const FeatureInputs& in, const FeatureConfig& cfg) {
  const auto val = window_features(pair.validation, in, cfg);
  const auto cal = window_features(pair.calibration, in, cfg);
  FeatureVector fv;
  fv.values.reserve(2 * kBaseCount + 1);
  fv.values.insert(fv.values.end(), val.begin(), val.end());
  for (std::size_t i = 0; i < kBaseCount; ++i) fv.values.push_back(val[i] - cal[i]);
  fv.values.push_back(static_cast<double>((pair.validation.start - pair.calibration.start).count()));
  return fv;
}

}  // namespace uberr
