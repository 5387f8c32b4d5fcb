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

#ifndef UBERR_FEATURES_HPP_
#define UBERR_FEATURES_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uberr/series.hpp"
#include "uberr/synthetic.hpp"
#include "uberr/ve_pair.hpp"

namespace uberr {

/// RMSE over slots present in both series divided by the mean measured value
/// over the same slots. Throws UndefinedMetric when that mean is not positive
/// or no common slot exists.
double cvrmse(const TimeSeries& measured, const TimeSeries& simulated);

/// Hourly loads of a whole-day window with their day-matched daily means and
/// the overall mean, all over present slots.
struct LoadWindow {
  std::vector<std::optional<double>> hourly;
  std::vector<std::optional<double>> daily;
  double weekly_mean = 0.0;

  static LoadWindow from_series(const TimeSeries& series);
};

enum class GaMode {
  // Each hour against its own day's mean.
  day_matched,
  // Every hour against every hour's daily mean (all pairs).
  literal_double_sum,
};

std::string_view to_string(GaMode mode);
GaMode parse_ga_mode(std::string_view text);

/// Relative power variation in percent:
///   G_a = 0.5 * sum_i |P_h,i - P_d(day(i))| / (P_w * N) * 100
/// with N the number of present hours (168 for a complete week).
double ga_weekly(const LoadWindow& window, GaMode mode = GaMode::day_matched);

// Sum of max(0, base - T_day).
double hdd(std::span<const double> daily_mean_temp, double base);

// Mean absolute deviation from the window mean, over present slots.
double mean_abs_deviation(const TimeSeries& series);

/// (mean |P_h - P_w| / P_w) / mean |T - mean(T)|.
/// Throws UndefinedMetric for a flat temperature or a non-positive mean load.
double thermoception(const LoadWindow& load, const TimeSeries& temperature);

struct WindowStats {
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;  // lower-middle element for even counts
  double max = 0.0;
};

WindowStats window_stats(const TimeSeries& series);
WindowStats window_stats(std::span<const double> values);

enum class FeatureGroup { energy_use, boundary, cv };
std::string_view to_string(FeatureGroup group);
FeatureGroup parse_feature_group(std::string_view text);

struct FeatureInfo {
  std::string name;
  std::string unit;
  FeatureGroup group;
};

/// Ordered feature schema: per-window energy use and boundary features, then
/// the validation-minus-calibration gaps and the time gap.
const std::vector<FeatureInfo>& feature_schema();
std::vector<std::string> feature_names();
const FeatureInfo& feature_info(std::string_view name);

struct FeatureConfig {
  double hdd_base_c = 18.0;
  GaMode ga_mode = GaMode::day_matched;
};

struct FeatureInputs {
  const TimeSeries& load;  // cleaned measured heat power, kW
  const WeatherSeries& weather;
  double floor_area = 1.0;
};

/// Named values in feature_schema() order.
struct FeatureVector {
  std::vector<double> values;

  double at(std::string_view name) const;
};

/// Base features of one window (no gaps), in schema order of the base names.
std::vector<double> window_features(const CalendarWindow& window, const FeatureInputs& in,
                                    const FeatureConfig& config);

FeatureVector extract_features(const VEPair& pair, const FeatureInputs& in,
                               const FeatureConfig& config = {});

}  // namespace uberr

#endif  // UBERR_FEATURES_HPP_
