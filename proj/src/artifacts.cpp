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

#include "uberr/artifacts.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Data lines after checking the header.
std::vector<std::string_view> data_lines(std::string_view text, std::string_view header) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty() || lines.front() != header) {
    throw InputError("CSV header must be '" + std::string(header) + "'");
  }
  lines.erase(lines.begin());
  return lines;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> parse_opt(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

void check_contiguous(Timestamp start, std::size_t i, Timestamp ts) {
  if (ts != start + std::chrono::hours(i)) throw InputError("CSV timestamps must be contiguous hourly slots");
}

constexpr std::string_view kMeasurementHeader =
    "substation_id,timestamp,heat_power_kw,flow_m3h,supply_temp_c,return_temp_c";
constexpr std::string_view kWeatherHeader = "timestamp,temp_c,ghi_wm2";
constexpr std::string_view kMaskHeader = "substation_id,timestamp,keep,reason";

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw InputError("invalid number '" + std::string(text) + "'");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for '" + path + "'");
  }
  fs::rename(tmp, target);
}

std::string measurements_csv(const SubstationMeasurements& m) {
  const auto& p = m.heat_power;
  if (!p.aligned_with(m.flow) || !p.aligned_with(m.supply_temp) || !p.aligned_with(m.return_temp)) {
    throw InputError("measurement columns are not aligned");
  }
  std::string out(kMeasurementHeader);
  out += '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += m.id + ',' + format_timestamp(p.time_at(i)) + ',' + opt(p[i]) + ',' + opt(m.flow[i]) + ',' +
           opt(m.supply_temp[i]) + ',' + opt(m.return_temp[i]) + '\n';
  }
  return out;
}

SubstationMeasurements parse_measurements_csv(std::string_view text) {
  const auto lines = data_lines(text, kMeasurementHeader);
  if (lines.empty()) throw InputError("measurement CSV has no rows");
  SubstationMeasurements m;
  std::vector<std::optional<double>> cols[4];
  Timestamp start{};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = split_line(lines[i]);
    if (f.size() != 6) throw InputError("measurement CSV rows need 6 fields");
    const Timestamp ts = parse_timestamp(f[1]);
    if (i == 0) {
      m.id = std::string(f[0]);
      start = ts;
    } else if (f[0] != m.id) {
      throw InputError("measurement CSV mixes substations");
    }
    check_contiguous(start, i, ts);
    for (int c = 0; c < 4; ++c) cols[c].push_back(parse_opt(f[2 + static_cast<std::size_t>(c)]));
  }
  m.heat_power = TimeSeries(start, std::move(cols[0]), Unit::kW);
  m.flow = TimeSeries(start, std::move(cols[1]), Unit::m3_per_h);
  m.supply_temp = TimeSeries(start, std::move(cols[2]), Unit::degC);
  m.return_temp = TimeSeries(start, std::move(cols[3]), Unit::degC);
  return m;
}

std::string weather_csv(const WeatherSeries& w) {
  if (!w.temperature.aligned_with(w.ghi)) throw InputError("weather columns are not aligned");
  std::string out(kWeatherHeader);
  out += '\n';
  for (std::size_t i = 0; i < w.temperature.size(); ++i) {
    out += format_timestamp(w.temperature.time_at(i)) + ',' + opt(w.temperature[i]) + ',' + opt(w.ghi[i]) + '\n';
  }
  return out;
}

WeatherSeries parse_weather_csv(std::string_view text) {
  const auto lines = data_lines(text, kWeatherHeader);
  if (lines.empty()) throw InputError("weather CSV has no rows");
  std::vector<std::optional<double>> t, g;
  Timestamp start{};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = split_line(lines[i]);
    if (f.size() != 3) throw InputError("weather CSV rows need 3 fields");
    const Timestamp ts = parse_timestamp(f[0]);
    if (i == 0) start = ts;
    check_contiguous(start, i, ts);
    t.push_back(parse_opt(f[1]));
    g.push_back(parse_opt(f[2]));
  }
  return {TimeSeries(start, std::move(t), Unit::degC), TimeSeries(start, std::move(g), Unit::W_per_m2)};
}

std::string mask_csv(const std::string& substation_id, Timestamp start, const CleaningMask& mask) {
  std::string out(kMaskHeader);
  out += '\n';
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out += substation_id + ',' + format_timestamp(start + std::chrono::hours(i)) + ',' + (mask.keep(i) ? "1" : "0") +
           ',' + std::string(to_string(mask.reason(i))) + '\n';
  }
  return out;
}

CleaningMask parse_mask_csv(std::string_view text) {
  const auto lines = data_lines(text, kMaskHeader);
  CleaningMask mask(lines.size());
  Timestamp start{};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = split_line(lines[i]);
    if (f.size() != 4) throw InputError("mask CSV rows need 4 fields");
    const Timestamp ts = parse_timestamp(f[1]);
    if (i == 0) start = ts;
    check_contiguous(start, i, ts);
    const RejectReason why = parse_reject_reason(f[3]);
    if ((f[2] == "1") != (why == RejectReason::none) || (f[2] != "0" && f[2] != "1")) {
      throw InputError("mask CSV keep flag disagrees with its reason");
    }
    if (why != RejectReason::none) mask.reject(i, why);
  }
  return mask;
}

std::string ve_csv(const VEDataset& d) {
  std::string out = "substation_id,cal_start,val_start,season,weight,target_cvrmse";
  for (const auto& n : d.feature_names) out += ',' + n;
  out += '\n';
  for (const auto& s : d.samples) {
    out += s.pair.substation_id + ',' + format_date(s.pair.calibration.start) + ',' +
           format_date(s.pair.validation.start) + ',' + s.pair.season + ',' + format_double(s.weight) + ',' +
           format_double(s.target_cvrmse);
    for (double v : s.features) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

json ve_sidecar(const VEDataset& d) {
  return {{"feature_names", d.feature_names}, {"samples", d.size()}, {"provenance", to_json(d.provenance)}};
}

VEDataset parse_ve(std::string_view csv, const json& sidecar) {
  VEDataset d;
  d.feature_names = sidecar.at("feature_names").get<std::vector<std::string>>();
  d.provenance = provenance_from_json(sidecar.at("provenance"));
  std::string header = "substation_id,cal_start,val_start,season,weight,target_cvrmse";
  for (const auto& n : d.feature_names) header += ',' + n;
  const auto lines = data_lines(csv, header);
  const std::size_t width = 6 + d.feature_names.size();
  for (const auto line : lines) {
    const auto f = split_line(line);
    if (f.size() != width) throw InputError("VE CSV row has the wrong number of fields");
    VESample s;
    s.pair.substation_id = std::string(f[0]);
    s.pair.calibration = CalendarWindow{parse_date(f[1])};
    s.pair.validation = CalendarWindow{parse_date(f[2])};
    s.pair.season = std::string(f[3]);
    s.weight = parse_double(f[4]);
    s.target_cvrmse = parse_double(f[5]);
    for (std::size_t k = 6; k < width; ++k) s.features.push_back(parse_double(f[k]));
    d.samples.push_back(std::move(s));
  }
  if (sidecar.at("samples").get<std::size_t>() != d.size()) throw InputError("VE sidecar sample count mismatch");
  d.validate();
  return d;
}

json to_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"seed", p.seed}, {"tool_version", p.tool_version}};
}

Provenance provenance_from_json(const json& j) {
  return {j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>(),
          j.at("tool_version").get<std::string>()};
}

json to_json(const BuildingParams& p) {
  return {{"ua", p.ua},
          {"capacitance", p.capacitance},
          {"floor_area", p.floor_area},
          {"setpoint_day", p.setpoint_day},
          {"setpoint_night", p.setpoint_night},
          {"night_start", p.night_start},
          {"night_end", p.night_end},
          {"solar_aperture", p.solar_aperture},
          {"dhw_daily_kwh", p.dhw_daily_kwh},
          {"max_heat_power", p.max_heat_power}};
}

BuildingParams building_params_from_json(const json& j) {
  BuildingParams p;
  p.ua = j.at("ua").get<double>();
  p.capacitance = j.at("capacitance").get<double>();
  p.floor_area = j.at("floor_area").get<double>();
  p.setpoint_day = j.at("setpoint_day").get<double>();
  p.setpoint_night = j.at("setpoint_night").get<double>();
  p.night_start = j.at("night_start").get<int>();
  p.night_end = j.at("night_end").get<int>();
  p.solar_aperture = j.at("solar_aperture").get<double>();
  p.dhw_daily_kwh = j.at("dhw_daily_kwh").get<double>();
  p.max_heat_power = j.at("max_heat_power").get<double>();
  p.validate();
  return p;
}

json to_json(const CalibrationResult& r) {
  return {{"substation_id", r.substation_id},
          {"window_start", format_date(r.window.start)},
          {"window_days", r.window.length_days},
          {"selected_params", to_json(r.selected_params)},
          {"calibration_error", r.calibration_error},
          {"candidate_count", r.candidate_count},
          {"selected_index", r.selected_index}};
}

CalibrationResult calibration_from_json(const json& j) {
  CalibrationResult r;
  r.substation_id = j.at("substation_id").get<std::string>();
  r.window = CalendarWindow{parse_date(j.at("window_start").get<std::string>()), j.at("window_days").get<int>()};
  r.selected_params = building_params_from_json(j.at("selected_params"));
  r.calibration_error = j.at("calibration_error").get<double>();
  r.candidate_count = j.at("candidate_count").get<int>();
  r.selected_index = j.at("selected_index").get<int>();
  return r;
}

json to_json(const HeatingSeason& s) {
  return {{"label", s.label}, {"start", format_date(s.start_date)}, {"end", format_date(s.end_date)}};
}

HeatingSeason season_from_json(const json& j) {
  return {j.at("label").get<std::string>(), parse_date(j.at("start").get<std::string>()),
          parse_date(j.at("end").get<std::string>())};
}

json feature_schema_json() {
  json out = json::array();
  for (const auto& f : feature_schema()) {
    out.push_back({{"name", f.name}, {"unit", f.unit}, {"group", std::string(to_string(f.group))}});
  }
  return out;
}

json to_json(const SelectionReport& r) {
  auto ranked = [](const std::vector<RankedFeature>& v) {
    json a = json::array();
    for (const auto& f : v) a.push_back({{"feature", f.name}, {"group", std::string(to_string(f.group))}, {"dcor", f.dcor}});
    return a;
  };
  json ex = json::array();
  for (const auto& e : r.exclusions) ex.push_back({{"feature", e.feature}, {"conflicting", e.conflicting}, {"dcor", e.dcor}});
  return {{"ranking", ranked(r.ranking)}, {"selected", ranked(r.selected)}, {"exclusions", ex}, {"ordering", r.ordering}};
}

SelectionReport selection_from_json(const json& j) {
  auto ranked = [](const json& a) {
    std::vector<RankedFeature> v;
    for (const auto& f : a) {
      v.push_back({f.at("feature").get<std::string>(), parse_feature_group(f.at("group").get<std::string>()),
                   f.at("dcor").get<double>()});
    }
    return v;
  };
  SelectionReport r;
  r.ranking = ranked(j.at("ranking"));
  r.selected = ranked(j.at("selected"));
  for (const auto& e : j.at("exclusions")) {
    r.exclusions.push_back({e.at("feature").get<std::string>(), e.at("conflicting").get<std::string>(),
                            e.at("dcor").get<double>()});
  }
  r.ordering = j.at("ordering").get<std::vector<std::string>>();
  return r;
}

json to_json(const TransformSpec& spec) {
  json out = json::object();
  for (const auto& [name, t] : spec.attributes()) {
    json a{{"shift", t.boxcox.shift},
           {"boxcox_lambda", t.boxcox.lambda ? json(*t.boxcox.lambda) : json(nullptr)},
           {"boxcox_lower", t.boxcox.lambda ? json(t.lower) : json(nullptr)},
           {"min", t.minmax.min},
           {"max", t.minmax.max},
           {"scaled", t.minmax.scaled}};
    out[name] = std::move(a);
  }
  return out;
}

TransformSpec transform_spec_from_json(const json& j) {
  TransformSpec spec;
  for (const auto& [name, a] : j.items()) {
    AttributeTransform t;
    t.boxcox.shift = a.at("shift").get<double>();
    if (!a.at("boxcox_lambda").is_null()) {
      t.boxcox.lambda = a.at("boxcox_lambda").get<double>();
      t.lower = a.at("boxcox_lower").get<double>();
    }
    t.minmax.min = a.at("min").get<double>();
    t.minmax.max = a.at("max").get<double>();
    t.minmax.scaled = a.at("scaled").get<bool>();
    spec.set(name, t);
  }
  return spec;
}

json model_json(const TrainedModel& m, const KernelBounds& bounds, const std::string& dataset_file,
                const std::string& dataset_sha256, const Provenance& provenance) {
  const auto& a = m.model.alpha();
  return {{"provenance", to_json(provenance)},
          {"features", m.features},
          {"kernel", to_json(m.model.params())},
          {"bounds", to_json(bounds)},
          {"jitter", m.model.jitter()},
          {"alpha", std::vector<double>(a.data(), a.data() + a.size())},
          {"dataset", {{"file", dataset_file}, {"sha256", dataset_sha256}}},
          {"train_rows", m.train_rows},
          {"transforms", to_json(m.transforms)}};
}

TrainedModel load_model(const json& j, const VEDataset& dataset) {
  const auto features = j.at("features").get<std::vector<std::string>>();
  const auto rows = j.at("train_rows").get<std::vector<std::size_t>>();
  for (std::size_t r : rows) {
    if (r >= dataset.size()) throw InputError("model references a row outside the dataset");
  }
  TransformSpec spec = transform_spec_from_json(j.at("transforms"));
  const auto alpha_v = j.at("alpha").get<std::vector<double>>();
  if (alpha_v.size() != rows.size()) throw InputError("model alpha and row counts differ");
  Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(alpha_v.data(), static_cast<Eigen::Index>(alpha_v.size()));
  GPModel model(design_matrix(dataset, features, spec, rows), target_vector(dataset, spec, rows), std::move(alpha),
                kernel_params_from_json(j.at("kernel")));
  return {features, std::move(spec), std::move(model), rows};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace uberr
