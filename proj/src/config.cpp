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

#include "uberr/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto r = std::from_chars(text.data(), end, value);
  if (text.empty() || r.ec != std::errc{} || r.ptr != end) throw InputError("invalid number '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InputError("invalid boolean '" + text + "'");
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(item));
  return out;
}

std::string fmt_range(const ParamRange& r) { return fmt(r.low) + "," + fmt(r.high); }

ParamRange parse_range(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw InputError("expected 'low,high', got '" + text + "'");
  ParamRange r{parse_number<double>(parts[0]), parse_number<double>(parts[1])};
  if (!(r.low <= r.high)) throw InputError("range '" + text + "' has low > high");
  return r;
}

std::string fmt_seasons(const std::vector<HeatingSeason>& seasons) {
  std::string out;
  for (std::size_t i = 0; i < seasons.size(); ++i) {
    if (i) out += ';';
    out += seasons[i].label + ":" + format_date(seasons[i].start_date) + ":" + format_date(seasons[i].end_date);
  }
  return out;
}

std::vector<HeatingSeason> parse_seasons(const std::string& text) {
  std::vector<HeatingSeason> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ';')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw InputError("season must be 'label:YYYY-MM-DD:YYYY-MM-DD', got '" + item + "'");
    out.push_back({parts[0], parse_date(parts[1]), parse_date(parts[2])});
  }
  validate_seasons(out);
  return out;
}

std::string_view to_string(PinMode m) {
  switch (m) {
    case PinMode::weighted_median: return "weighted_median";
    case PinMode::mean: return "mean";
    case PinMode::custom: return "custom";
  }
  return "weighted_median";
}

PinMode parse_pin_mode(const std::string& text) {
  if (text == "weighted_median") return PinMode::weighted_median;
  if (text == "mean") return PinMode::mean;
  if (text == "custom") return PinMode::custom;
  throw InputError("pin must be weighted_median, mean or custom, got '" + text + "'");
}

std::string fmt_pins(const std::map<std::string, double>& pins) {
  std::string out;
  for (const auto& [k, v] : pins) {
    if (!out.empty()) out += ',';
    out += k + ":" + fmt(v);
  }
  return out;
}

std::map<std::string, double> parse_pins(const std::string& text) {
  std::map<std::string, double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw InputError("pin must be 'feature:value', got '" + item + "'");
    feature_info(parts[0]);
    out[parts[0]] = parse_number<double>(parts[1]);
  }
  return out;
}

struct Key {
  std::string section;
  std::string name;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Access>
Key number_key(std::string section, std::string name, std::string help, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>;
  return {std::move(section), std::move(name), std::move(help),
          [access](const RunConfig& c) {
            const T v = access(const_cast<RunConfig&>(c));
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(v);
            } else {
              return std::to_string(v);
            }
          },
          [access](RunConfig& c, const std::string& s) { access(c) = parse_number<T>(s); }};
}

template <typename Access>
Key custom_key(std::string section, std::string name, std::string help, Access access,
               std::function<std::string(const std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>&)>
                   to_text,
               std::function<std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>(const std::string&)>
                   from_text) {
  return {std::move(section), std::move(name), std::move(help),
          [access, to_text](const RunConfig& c) { return to_text(access(const_cast<RunConfig&>(c))); },
          [access, from_text](RunConfig& c, const std::string& s) { access(c) = from_text(s); }};
}

Key bool_key(std::string section, std::string name, std::string help, std::function<bool&(RunConfig&)> access) {
  return custom_key(
      std::move(section), std::move(name), std::move(help), access,
      std::function<std::string(const bool&)>([](const bool& b) { return std::string(b ? "true" : "false"); }),
      std::function<bool(const std::string&)>(parse_bool));
}

Key range_key(std::string section, std::string name, std::string help, std::function<ParamRange&(RunConfig&)> access) {
  return custom_key(std::move(section), std::move(name), std::move(help), access,
                    std::function<std::string(const ParamRange&)>(fmt_range),
                    std::function<ParamRange(const std::string&)>(parse_range));
}

Key bounds_key(std::string section, std::string name, std::string help,
               std::function<ParamBounds&(RunConfig&)> access) {
  return custom_key(
      std::move(section), std::move(name), std::move(help), access,
      std::function<std::string(const ParamBounds&)>(
          [](const ParamBounds& b) { return fmt_range({b.low, b.high}); }),
      std::function<ParamBounds(const std::string&)>([](const std::string& s) {
        const ParamRange r = parse_range(s);
        return ParamBounds{r.low, r.high};
      }));
}

#define UBERR_NUM(sec, key, help, expr) number_key(sec, key, help, [](RunConfig& c) -> auto& { return expr; })

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(UBERR_NUM("scenario", "seed", "base seed of the synthetic district", c.scenario.seed));
    k.push_back(custom_key(
        "scenario", "start", "first day of the record (YYYY-MM-DD)", [](RunConfig& c) -> Date& { return c.scenario.start; },
        std::function<std::string(const Date&)>(format_date),
        std::function<Date(const std::string&)>([](const std::string& s) { return parse_date(s); })));
    k.push_back(UBERR_NUM("scenario", "days", "record length in days", c.scenario.days));
    k.push_back(UBERR_NUM("scenario", "substations", "number of substations", c.scenario.substations));
    k.push_back(UBERR_NUM("scenario", "multiplicative_noise", "relative measurement noise std",
                          c.scenario.multiplicative_noise));
    k.push_back(UBERR_NUM("scenario", "additive_noise", "additive noise std as a fraction of design load",
                          c.scenario.additive_noise));
    k.push_back(UBERR_NUM("scenario", "spike_rate", "spike anomalies per substation-week", c.scenario.spike_rate));
    k.push_back(UBERR_NUM("scenario", "stuck_rate", "stuck-meter anomalies per substation-week", c.scenario.stuck_rate));
    k.push_back(UBERR_NUM("scenario", "dropout_rate", "dropouts per substation-week", c.scenario.dropout_rate));
    k.push_back(UBERR_NUM("scenario", "occupancy_intensity", "occupant-driven load noise, fraction of design load",
                          c.scenario.occupancy_intensity));
    k.push_back(UBERR_NUM("scenario", "ua_nonlinearity", "relative UA change per 15 K of indoor-outdoor difference",
                          c.scenario.ua_nonlinearity));
    k.push_back(UBERR_NUM("scenario", "mass_fraction", "share of capacitance in the slow mass node",
                          c.scenario.mass_fraction));
    k.push_back(UBERR_NUM("scenario", "bill_noise", "relative noise of non-heating bills", c.scenario.bill_noise));
    k.push_back(bool_key("scenario", "perfect_surrogate", "generator equals the surrogate, no noise or anomalies",
                         [](RunConfig& c) -> bool& { return c.scenario.perfect_surrogate; }));
    k.push_back(UBERR_NUM("scenario", "weather_climate_mean_c", "annual mean temperature",
                          c.scenario.weather.climate_mean_c));
    k.push_back(UBERR_NUM("scenario", "weather_seasonal_amplitude_c", "seasonal temperature amplitude",
                          c.scenario.weather.seasonal_amplitude_c));
    k.push_back(UBERR_NUM("scenario", "weather_diurnal_amplitude_c", "diurnal temperature amplitude",
                          c.scenario.weather.diurnal_amplitude_c));
    k.push_back(UBERR_NUM("scenario", "weather_ar_coefficient", "hourly AR(1) coefficient of weather anomalies",
                          c.scenario.weather.ar_coefficient));
    k.push_back(UBERR_NUM("scenario", "weather_ar_sigma_c", "AR(1) innovation std", c.scenario.weather.ar_sigma_c));
    k.push_back(UBERR_NUM("scenario", "weather_ghi_peak_mean", "mean clear-sky noon GHI",
                          c.scenario.weather.ghi_peak_mean));

    k.push_back(UBERR_NUM("cleaning", "window_days", "centered window of the 3-sigma filter", c.cleaning.window_days));
    k.push_back(UBERR_NUM("cleaning", "consistency_tol", "relative tolerance of the power/flow check",
                          c.cleaning.consistency_tol));
    k.push_back(UBERR_NUM("cleaning", "consistency_floor_kw", "absolute floor of the power/flow check",
                          c.cleaning.consistency_floor_kw));
    k.push_back(UBERR_NUM("cleaning", "r_min", "minimum daily energy/HDD correlation per season", c.cleaning.r_min));
    k.push_back(UBERR_NUM("cleaning", "hdd_base_c", "HDD base temperature for the season screen",
                          c.cleaning.hdd_base_c));

    k.push_back(UBERR_NUM("calibration", "candidates", "random parameter combinations per substation",
                          c.calibration.candidates));
    k.push_back(UBERR_NUM("calibration", "seed", "candidate sampling seed", c.calibration.seed));
    k.push_back(range_key("calibration", "ua_per_m2", "UA range, W/K per m2",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.ua_per_m2; }));
    k.push_back(range_key("calibration", "capacitance_per_m2", "capacitance range, J/K per m2",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.capacitance_per_m2; }));
    k.push_back(range_key("calibration", "setpoint_day", "daytime setpoint range, degC",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.setpoint_day; }));
    k.push_back(range_key("calibration", "setpoint_night", "night setpoint range, degC",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.setpoint_night; }));
    k.push_back(range_key("calibration", "aperture_per_m2", "solar aperture range, m2 per m2",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.aperture_per_m2; }));
    k.push_back(range_key("calibration", "dhw_per_m2", "prior DHW range, kWh/day per m2",
                          [](RunConfig& c) -> ParamRange& { return c.calibration.ranges.dhw_per_m2; }));

    k.push_back(custom_key(
        "ve", "seasons", "heating seasons 'label:start:end;...' (empty: Oct 1 - May 31)",
        [](RunConfig& c) -> std::vector<HeatingSeason>& { return c.seasons; },
        std::function<std::string(const std::vector<HeatingSeason>&)>(fmt_seasons),
        std::function<std::vector<HeatingSeason>(const std::string&)>(parse_seasons)));
    k.push_back(UBERR_NUM("ve", "max_missing_slots", "windows with more missing hours are dropped",
                          c.ve.max_missing_slots));

    k.push_back(UBERR_NUM("features", "hdd_base_c", "HDD base temperature", c.features.hdd_base_c));
    k.push_back(custom_key(
        "features", "ga_mode", "power variation form: day_matched or literal_double_sum",
        [](RunConfig& c) -> GaMode& { return c.features.ga_mode; },
        std::function<std::string(const GaMode&)>([](const GaMode& m) { return std::string(to_string(m)); }),
        std::function<GaMode(const std::string&)>([](const std::string& s) { return parse_ga_mode(s); })));

    k.push_back(UBERR_NUM("select", "per_group", "features selected per group", c.select.per_group));
    k.push_back(UBERR_NUM("select", "exclusion_threshold", "pairwise dcor above which a feature is excluded",
                          c.select.exclusion_threshold));
    k.push_back(bool_key("select", "cross_group_exclusion", "apply the pairwise rule across groups",
                         [](RunConfig& c) -> bool& { return c.select.cross_group_exclusion; }));
    k.push_back(UBERR_NUM("select", "max_rows", "rows used for dcor (0: all)", c.select.max_rows));
    k.push_back(UBERR_NUM("select", "skew_threshold", "Box-Cox only above this absolute skewness",
                          c.transforms.skew_threshold));
    k.push_back(bool_key("select", "boxcox_positive_only", "Box-Cox only strictly positive attributes",
                         [](RunConfig& c) -> bool& { return c.transforms.positive_only; }));

    k.push_back(bounds_key("gp", "signal_variance_bounds", "constant kernel bounds", [](RunConfig& c) -> ParamBounds& {
      return c.model.gp.bounds.signal_variance;
    }));
    k.push_back(bounds_key("gp", "lengthscale_bounds", "RBF lengthscale bounds", [](RunConfig& c) -> ParamBounds& {
      return c.model.gp.bounds.lengthscale;
    }));
    k.push_back(bounds_key("gp", "noise_variance_bounds", "white kernel bounds", [](RunConfig& c) -> ParamBounds& {
      return c.model.gp.bounds.noise_variance;
    }));
    k.push_back(UBERR_NUM("gp", "restarts", "optimizer starts", c.model.gp.restarts));
    k.push_back(UBERR_NUM("gp", "max_iterations", "optimizer iterations per start", c.model.gp.max_iterations));
    k.push_back(UBERR_NUM("gp", "tolerance", "relative likelihood change that stops a start", c.model.gp.tolerance));
    k.push_back(UBERR_NUM("gp", "base_alpha", "per-sample noise at the mean weight", c.model.base_alpha));
    k.push_back(bool_key("gp", "per_dimension_lengthscales", "one lengthscale per feature",
                         [](RunConfig& c) -> bool& { return c.model.gp.per_dimension_lengthscales; }));
    k.push_back(UBERR_NUM("gp", "features", "number of ordered features in the trained model", c.model_features));
    k.push_back(bool_key("gp", "include_curve_feature", "swap grid.curve_feature into the trained model",
                         [](RunConfig& c) -> bool& { return c.model_includes_curve_feature; }));
    k.push_back(UBERR_NUM("gp", "n", "training sample size of the trained model", c.train_n));

    k.push_back(custom_key(
        "eval", "sizes", "sample sizes of the size sweep", [](RunConfig& c) -> std::vector<std::size_t>& {
          return c.eval.sizes;
        },
        std::function<std::string(const std::vector<std::size_t>&)>(join<std::size_t>),
        std::function<std::vector<std::size_t>(const std::string&)>(parse_list<std::size_t>)));
    k.push_back(UBERR_NUM("eval", "k_min", "smallest feature count of the feature sweep", c.eval.k_min));
    k.push_back(UBERR_NUM("eval", "k_max", "largest feature count of the feature sweep", c.eval.k_max));
    k.push_back(UBERR_NUM("eval", "n", "sample size of the feature sweep and of eval", c.eval.n));
    k.push_back(custom_key(
        "eval", "seeds", "evaluation seeds", [](RunConfig& c) -> std::vector<std::uint64_t>& { return c.eval.seeds; },
        std::function<std::string(const std::vector<std::uint64_t>&)>(join<std::uint64_t>),
        std::function<std::vector<std::uint64_t>(const std::string&)>(parse_list<std::uint64_t>)));
    k.push_back(custom_key(
        "eval", "split", "interpolation, extrapolation or both", [](RunConfig& c) -> std::string& { return c.eval.split; },
        std::function<std::string(const std::string&)>([](const std::string& s) { return s; }),
        std::function<std::string(const std::string&)>([](const std::string& s) { return s; })));

    k.push_back(UBERR_NUM("grid", "resolution", "lattice points per axis", c.grid.resolution));
    k.push_back(UBERR_NUM("grid", "extend_fraction", "lattice extension beyond the training range",
                          c.grid.extend_fraction));
    k.push_back(custom_key(
        "grid", "pin", "pin of non-axis features: weighted_median, mean or custom",
        [](RunConfig& c) -> PinMode& { return c.grid.pin; },
        std::function<std::string(const PinMode&)>([](const PinMode& m) { return std::string(to_string(m)); }),
        std::function<PinMode(const std::string&)>(parse_pin_mode)));
    k.push_back(custom_key(
        "grid", "custom_pins", "raw pin values 'feature:value,...' for pin = custom",
        [](RunConfig& c) -> std::map<std::string, double>& { return c.grid.custom_pins; },
        std::function<std::string(const std::map<std::string, double>&)>(fmt_pins),
        std::function<std::map<std::string, double>(const std::string&)>(parse_pins)));
    k.push_back(UBERR_NUM("grid", "band_sigma", "half-width of the curve band in std units", c.grid.band_sigma));
    k.push_back(custom_key(
        "grid", "curve_feature", "axis of the 1-D curve", [](RunConfig& c) -> std::string& { return c.grid.curve_feature; },
        std::function<std::string(const std::string&)>([](const std::string& s) { return s; }),
        std::function<std::string(const std::string&)>([](const std::string& s) { return s; })));
    return k;
  }();
  return table;
}

#undef UBERR_NUM

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InputError("invalid config: " + what);
  };
  const auto& s = c.scenario;
  require(s.days >= 7, "scenario.days must be at least 7");
  require(s.substations >= 2, "scenario.substations must be at least 2");
  for (double v : {s.multiplicative_noise, s.additive_noise, s.spike_rate, s.stuck_rate, s.dropout_rate,
                   s.occupancy_intensity, s.bill_noise}) {
    require(v >= 0.0, "scenario noise levels and anomaly rates must be nonnegative");
  }
  require(s.mass_fraction >= 0.0 && s.mass_fraction < 1.0, "scenario.mass_fraction must be in [0, 1)");
  require(s.ua_nonlinearity >= 0.0, "scenario.ua_nonlinearity must be nonnegative");
  require(c.cleaning.window_days >= 1, "cleaning.window_days must be positive");
  require(c.cleaning.consistency_tol > 0.0, "cleaning.consistency_tol must be positive");
  require(c.cleaning.consistency_floor_kw >= 0.0, "cleaning.consistency_floor_kw must be nonnegative");
  require(c.cleaning.r_min >= -1.0 && c.cleaning.r_min <= 1.0, "cleaning.r_min must be in [-1, 1]");
  require(c.calibration.candidates >= 1, "calibration.candidates must be positive");
  require(c.calibration.ranges.setpoint_day.low >= 5.0 && c.calibration.ranges.setpoint_day.high <= 30.0,
          "calibration.setpoint_day must lie in [5, 30]");
  require(c.calibration.ranges.setpoint_night.low >= 5.0 && c.calibration.ranges.setpoint_night.high <= 30.0,
          "calibration.setpoint_night must lie in [5, 30]");
  require(c.calibration.ranges.ua_per_m2.low > 0.0 && c.calibration.ranges.capacitance_per_m2.low > 0.0,
          "calibration UA and capacitance ranges must be positive");
  require(c.select.per_group >= 1, "select.per_group must be positive");
  require(c.select.exclusion_threshold > 0.0 && c.select.exclusion_threshold <= 1.0,
          "select.exclusion_threshold must be in (0, 1]");
  require(c.transforms.skew_threshold >= 0.0, "select.skew_threshold must be nonnegative");
  c.model.gp.bounds.validate();
  require(c.model.gp.restarts >= 1, "gp.restarts must be positive");
  require(c.model.gp.max_iterations >= 1, "gp.max_iterations must be positive");
  require(c.model.gp.tolerance > 0.0, "gp.tolerance must be positive");
  require(c.model.base_alpha > 0.0, "gp.base_alpha must be positive");
  require(c.model_features >= 1, "gp.features must be positive");
  require(c.train_n >= 2, "gp.n must be at least 2");
  require(!c.eval.sizes.empty(), "eval.sizes must not be empty");
  for (std::size_t i = 0; i < c.eval.sizes.size(); ++i) {
    require(c.eval.sizes[i] >= 2, "eval.sizes must be at least 2");
    require(i == 0 || c.eval.sizes[i] > c.eval.sizes[i - 1], "eval.sizes must be strictly increasing");
  }
  require(c.eval.k_min >= 1 && c.eval.k_min <= c.eval.k_max, "eval.k_min must be in [1, k_max]");
  require(c.eval.n >= 2, "eval.n must be at least 2");
  require(!c.eval.seeds.empty(), "eval.seeds must not be empty");
  require(c.eval.split == "interpolation" || c.eval.split == "extrapolation" || c.eval.split == "both",
          "eval.split must be interpolation, extrapolation or both");
  require(c.grid.resolution >= 2, "grid.resolution must be at least 2");
  require(c.grid.extend_fraction >= 0.0, "grid.extend_fraction must be nonnegative");
  require(c.grid.band_sigma > 0.0, "grid.band_sigma must be positive");
  feature_info(c.grid.curve_feature);
}

void set_value(RunConfig& c, const std::string& section, const std::string& name, const std::string& value) {
  const Key* k = find_key(section, name);
  if (k == nullptr) throw InputError("unknown config key '" + section + "." + name + "'");
  try {
    k->set(c, value);
  } catch (const std::exception& e) {
    throw InputError("config key '" + section + "." + name + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw InputError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.parents.size() != 1) throw InputError("config key '" + item.fullname() + "' must sit inside a section");
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i) value += ',';
      value += item.inputs[i];
    }
    set_value(c, item.parents.front(), item.name, trim(value));
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> apply_env_overrides(RunConfig& config) {
  std::vector<std::string> used;
  for (const auto& k : keys()) {
    std::string var = "UBERR_" + k.section + "_" + k.name;
    for (char& ch : var) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(var.c_str())) {
      set_value(config, k.section, k.name, trim(v));
      used.push_back(var);
    }
  }
  validate(config);
  return used;
}

std::string canonical_text(const RunConfig& config) {
  std::string out, section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    const std::string v = k.get(config);
    out += k.name + " = " + (v.empty() ? std::string("\"\"") : v) + "\n";
  }
  return out;
}

std::string config_reference() {
  const RunConfig defaults;
  std::string out = "# uberr configuration reference. Every key is optional; values shown are defaults.\n"
                    "# Environment variables UBERR_<SECTION>_<KEY> override file values.\n";
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out += "\n[" + section + "]\n";
    }
    const std::string v = k.get(defaults);
    out += "# " + k.help + "\n" + k.name + " = " + (v.empty() ? std::string("\"\"") : v) + "\n";
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(canonical_text(config)); }

std::vector<HeatingSeason> effective_seasons(const RunConfig& config) {
  if (!config.seasons.empty()) return config.seasons;
  const Date first = config.scenario.start;
  return default_seasons(first, first + std::chrono::days(config.scenario.days - 1));
}

}  // namespace uberr
