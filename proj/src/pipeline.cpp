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

#include "uberr/pipeline.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "uberr/artifacts.hpp"
#include "uberr/errors.hpp"

namespace uberr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::map<std::string, std::string>& producers() {
  static const std::map<std::string, std::string> m = {
      {"scenario.json", "synth"},      {"weather.csv", "synth"},        {"clean/screens.json", "clean"},
      {"calibration.json", "calibrate"}, {"ve_dataset.csv", "build-ve"}, {"ve_dataset.json", "build-ve"},
      {"selection.json", "select"},    {"model.json", "train"}};
  return m;
}

std::string producer_of(const std::string& file) {
  auto it = producers().find(file);
  if (it != producers().end()) return it->second;
  if (file.rfind("measurements/", 0) == 0) return "synth";
  if (file.rfind("clean/", 0) == 0) return "clean";
  return "?";
}

std::string sample_rows_key(const StageOverrides& o) {
  std::string key;
  for (const auto& f : o.features) key += f + ",";
  key += "|n=" + (o.n ? std::to_string(*o.n) : std::string());
  key += "|split=" + o.split.value_or("");
  key += "|k=" + (o.k_min ? std::to_string(*o.k_min) : std::string()) + "-" +
         (o.k_max ? std::to_string(*o.k_max) : std::string());
  return key;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, std::string out_dir)
    : config_(std::move(config)), out_dir_(std::move(out_dir)), hash_(uberr::config_hash(config_)) {}

const std::vector<std::string>& Pipeline::stages() {
  static const std::vector<std::string> s = {"synth", "clean", "calibrate", "build-ve",
                                             "select", "train", "eval", "grid"};
  return s;
}

std::string Pipeline::path(const std::string& relative) const { return (fs::path(out_dir_) / relative).string(); }

namespace {

class Context {
 public:
  Context(const Pipeline& p, const StageOverrides& o) : p_(p), o_(o) {}

  const RunConfig& cfg() const { return p_.config(); }
  const StageOverrides& overrides() const { return o_; }
  std::string path(const std::string& rel) const { return p_.path(rel); }
  Provenance provenance() const { return {p_.config_hash(), cfg().scenario.seed, UBERR_VERSION}; }

  std::string read(const std::string& rel) const { return read_file(path(rel)); }
  json read_json(const std::string& rel) const { return json::parse(read(rel)); }
  void write(const std::string& rel, std::string_view content) {
    write_file(path(rel), content);
    outputs.push_back(rel);
  }
  void write_json(const std::string& rel, json j) {
    j["provenance"] = to_json(provenance());
    write(rel, dump(j));
  }

  std::vector<std::string> substation_ids() const {
    std::vector<std::string> ids;
    const json scenario = read_json("scenario.json");
    for (const auto& s : scenario.at("substations")) ids.push_back(s.at("id").get<std::string>());
    return ids;
  }

  WeatherSeries weather() const { return parse_weather_csv(read("weather.csv")); }

  DistrictData district() const {
    DistrictData d;
    d.weather = weather();
    d.seasons = effective_seasons(cfg());
    const json scenario = read_json("scenario.json");
    for (const auto& s : scenario.at("substations")) {
      SubstationData sub;
      sub.id = s.at("id").get<std::string>();
      sub.metadata = building_params_from_json(s.at("metadata"));
      for (const auto& b : s.at("nonheating_bills")) {
        sub.nonheating_bills.push_back({b.at("days").get<int>(), b.at("energy_kwh").get<double>()});
      }
      const auto m = parse_measurements_csv(read("measurements/" + sub.id + ".csv"));
      const auto mask = parse_mask_csv(read("clean/" + sub.id + "_mask.csv"));
      sub.cleaned_load = apply_mask(m.heat_power, mask);
      d.substations.push_back(std::move(sub));
    }
    return d;
  }

  VEDataset dataset() const { return parse_ve(read("ve_dataset.csv"), read_json("ve_dataset.json")); }

  SelectionReport selection() const { return selection_from_json(read_json("selection.json").at("report")); }

  std::vector<std::string> outputs;

 private:
  const Pipeline& p_;
  const StageOverrides& o_;
};

std::vector<std::string> inputs_of(const std::string& stage, const Pipeline& p) {
  std::vector<std::string> in;
  auto with_measurements = [&] {
    in = {"scenario.json", "weather.csv"};
    if (fs::exists(p.path("scenario.json"))) {
      const auto j = json::parse(read_file(p.path("scenario.json")));
      for (const auto& s : j.at("substations")) in.push_back("measurements/" + s.at("id").get<std::string>() + ".csv");
    }
  };
  auto with_masks = [&] {
    with_measurements();
    if (fs::exists(p.path("scenario.json"))) {
      const auto j = json::parse(read_file(p.path("scenario.json")));
      for (const auto& s : j.at("substations")) in.push_back("clean/" + s.at("id").get<std::string>() + "_mask.csv");
    }
  };
  if (stage == "synth") return in;
  if (stage == "clean") {
    with_measurements();
  } else if (stage == "calibrate") {
    with_masks();
  } else if (stage == "build-ve") {
    with_masks();
    in.push_back("calibration.json");
  } else if (stage == "select") {
    in = {"ve_dataset.csv", "ve_dataset.json"};
  } else if (stage == "train" || stage == "sweep-size" || stage == "sweep-features") {
    in = {"ve_dataset.csv", "ve_dataset.json", "selection.json"};
  } else if (stage == "eval" || stage == "grid") {
    in = {"ve_dataset.csv", "ve_dataset.json", "model.json"};
  } else {
    throw InputError("unknown stage '" + stage + "'");
  }
  return in;
}

void stage_synth(Context& c) {
  const auto& cfg = c.cfg();
  const DistrictScenario sc = make_scenario(cfg.scenario);
  c.write("weather.csv", weather_csv(sc.weather));
  json subs = json::array();
  for (std::size_t i = 0; i < sc.substations.size(); ++i) {
    const auto& spec = sc.substations[i];
    c.write("measurements/" + spec.id + ".csv", measurements_csv(synthesize_substation(sc, i)));
    json bills = json::array();
    for (const auto& b : spec.nonheating_bills) bills.push_back({{"days", b.days}, {"energy_kwh", b.energy_kwh}});
    subs.push_back({{"id", spec.id}, {"metadata", to_json(spec.truth)}, {"nonheating_bills", bills}});
  }
  json seasons = json::array();
  for (const auto& s : effective_seasons(cfg)) seasons.push_back(to_json(s));
  c.write_json("scenario.json", {{"start", format_date(cfg.scenario.start)},
                                 {"days", cfg.scenario.days},
                                 {"seasons", seasons},
                                 {"substations", subs}});
}

void stage_clean(Context& c) {
  const auto weather = c.weather();
  const auto seasons = effective_seasons(c.cfg());
  json screens = json::object();
  for (const auto& id : c.substation_ids()) {
    const auto m = parse_measurements_csv(c.read("measurements/" + id + ".csv"));
    const auto r = clean_substation(m, weather, seasons, c.cfg().cleaning);
    c.write("clean/" + id + "_mask.csv", mask_csv(id, m.heat_power.start(), r.mask));
    json s = json::array();
    for (const auto& v : r.seasons) {
      s.push_back({{"season", v.season},
                   {"verdict", std::string(to_string(v.verdict))},
                   {"correlation", v.correlation},
                   {"valid_days", v.valid_days}});
    }
    screens[id] = {{"rejected_slots", r.mask.rejected_count()}, {"seasons", s}};
  }
  c.write_json("clean/screens.json", {{"substations", screens}});
}

void stage_calibrate(Context& c) {
  const auto results = calibrate_district(c.district(), c.cfg().calibration, c.cfg().ve);
  json arr = json::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  c.write_json("calibration.json", {{"results", arr}});
}

void stage_build_ve(Context& c) {
  std::vector<CalibrationResult> cal;
  const json calibration = c.read_json("calibration.json");
  for (const auto& r : calibration.at("results")) cal.push_back(calibration_from_json(r));
  const auto built = build_dataset(c.district(), cal, c.cfg().features, c.cfg().ve, c.provenance());
  c.write("ve_dataset.csv", ve_csv(built.dataset));
  json side = ve_sidecar(built.dataset);
  side["skipped"] = built.skipped;
  c.write("ve_dataset.json", dump(side));
}

void stage_select(Context& c) {
  const auto d = c.dataset();
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::string> attrs = d.feature_names;
  attrs.push_back("target_cvrmse");
  const TransformSpec spec = fit_transforms(d, all, attrs, c.cfg().transforms);
  const auto report = select_features(d, spec, c.cfg().select);
  c.write_json("selection.json", {{"report", to_json(report)}, {"transforms", to_json(spec)}});
}

std::vector<std::string> model_features(const Context& c) {
  if (!c.overrides().features.empty()) {
    for (const auto& f : c.overrides().features) feature_info(f);
    return c.overrides().features;
  }
  const auto report = c.selection();
  const std::size_t k = std::min(c.cfg().model_features, report.selected.size());
  if (c.cfg().model_includes_curve_feature) return order_features_with(report, k, c.cfg().grid.curve_feature);
  return order_features(report, k);
}

void stage_train(Context& c) {
  const auto d = c.dataset();
  const auto features = model_features(c);
  const std::size_t n = c.overrides().n.value_or(c.cfg().train_n);
  if (n > d.size()) {
    throw InputError("training size " + std::to_string(n) + " exceeds the " + std::to_string(d.size()) +
                     " available samples");
  }
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(c.cfg().scenario.seed, 101));
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(n);
  std::sort(rows.begin(), rows.end());
  const auto t = train_model(d, features, rows, c.cfg().model, derive_seed(c.cfg().scenario.seed, 102));
  const std::string ds_sha = sha256_hex(c.read("ve_dataset.csv"));
  c.write("model.json", dump(model_json(t, c.cfg().model.gp.bounds, "ve_dataset.csv", ds_sha, c.provenance())));
}

TrainedModel loaded_model(const Context& c, const VEDataset& d) {
  const auto j = c.read_json("model.json");
  if (j.at("dataset").at("sha256").get<std::string>() != sha256_hex(c.read("ve_dataset.csv"))) {
    throw InputError("model.json was trained on a different VE dataset; rerun 'train'");
  }
  return load_model(j, d);
}

void stage_eval(Context& c) {
  const auto d = c.dataset();
  const auto t = loaded_model(c, d);
  const std::string split = c.overrides().split.value_or(c.cfg().eval.split);
  const std::size_t n = c.overrides().n.value_or(c.cfg().eval.n);
  const std::uint64_t seed = c.cfg().eval.seeds.front();
  if (split == "interpolation" || split == "both") {
    c.write_json("eval_interpolation.json", {{"report", to_json(interpolation_eval(d, n, t.features, c.cfg().model, seed))}});
  }
  if (split == "extrapolation" || split == "both") {
    c.write_json("eval_extrapolation.json", {{"report", to_json(extrapolation_eval(d, n, t.features, c.cfg().model, seed))}});
  }
  if (split != "interpolation" && split != "extrapolation" && split != "both") {
    throw InputError("split must be interpolation, extrapolation or both");
  }
}

void stage_grid(Context& c) {
  const auto d = c.dataset();
  const auto t = loaded_model(c, d);
  const auto bundle = structure_report(t, d, c.cfg().grid);
  json index = json::array();
  auto emit = [&](const GridSurface& s) {
    std::string name = "grid/" + s.view + "_" + s.axes[0].feature;
    if (s.axes.size() == 2) name += "__" + s.axes[1].feature;
    c.write(name + ".csv", to_csv(s));
    json js = to_json(s);
    js["file"] = name + ".csv";
    index.push_back(std::move(js));
  };
  emit(bundle.curve);
  for (const auto* group : {&bundle.mean_maps, &bundle.std_maps, &bundle.density_maps}) {
    for (const auto& s : *group) emit(s);
  }
  c.write_json("grid/structure.json", {{"surfaces", index}});
}

SweepOptions sweep_options(const Context& c) {
  const std::string split = c.overrides().split.value_or(c.cfg().eval.split);
  return {split != "extrapolation", split != "interpolation"};
}

void stage_sweep_size(Context& c) {
  const auto d = c.dataset();
  const auto report = c.selection();
  const auto features = c.overrides().features.empty() ? order_features(report, std::min<std::size_t>(3, report.selected.size()))
                                                       : c.overrides().features;
  const auto r = sweep_size(d, c.cfg().eval.sizes, features, c.cfg().model, c.cfg().eval.seeds, sweep_options(c));
  c.write_json("sweep_size.json", {{"sweep", to_json(r)}});
  c.write("sweep_size.csv", sweep_csv(r));
}

void stage_sweep_features(Context& c) {
  const auto d = c.dataset();
  const auto report = c.selection();
  const std::size_t k_min = c.overrides().k_min.value_or(c.cfg().eval.k_min);
  const std::size_t k_max = std::min(c.overrides().k_max.value_or(c.cfg().eval.k_max), report.ordering.size());
  std::vector<std::size_t> ks;
  for (std::size_t k = k_min; k <= k_max; ++k) ks.push_back(k);
  const std::size_t n = c.overrides().n.value_or(c.cfg().eval.n);
  const auto r = sweep_features(d, report.ordering, ks, n, c.cfg().model, c.cfg().eval.seeds, sweep_options(c));
  c.write_json("sweep_features.json", {{"sweep", to_json(r)}});
  c.write("sweep_features.csv", sweep_csv(r));
}

const std::map<std::string, std::function<void(Context&)>>& bodies() {
  static const std::map<std::string, std::function<void(Context&)>> m = {
      {"synth", stage_synth},       {"clean", stage_clean},
      {"calibrate", stage_calibrate}, {"build-ve", stage_build_ve},
      {"select", stage_select},     {"train", stage_train},
      {"eval", stage_eval},         {"grid", stage_grid},
      {"sweep-size", stage_sweep_size}, {"sweep-features", stage_sweep_features}};
  return m;
}

json file_hashes(const Pipeline& p, const std::vector<std::string>& files) {
  json out = json::object();
  for (const auto& f : files) out[f] = sha256_hex(read_file(p.path(f)));
  return out;
}

}  // namespace

StageOutcome Pipeline::run(const std::string& stage, const StageOverrides& overrides, bool force) {
  auto body = bodies().find(stage);
  if (body == bodies().end()) throw StageError(stage, "unknown stage");
  try {
    const auto inputs = inputs_of(stage, *this);
    for (const auto& in : inputs) {
      if (!fs::exists(path(in))) {
        throw StageError(stage, "missing input '" + in + "'; run stage '" + producer_of(in) + "' first");
      }
    }
    const json input_hashes = file_hashes(*this, inputs);
    const std::string key = sample_rows_key(overrides);
    const std::string stamp_file = "stamps/" + stage + ".json";

    if (!force && fs::exists(path(stamp_file))) {
      const json stamp = json::parse(read_file(path(stamp_file)));
      bool valid = stamp.value("config_hash", "") == hash_ && stamp.value("overrides", "") == key &&
                   stamp.at("inputs") == input_hashes;
      std::vector<std::string> outs;
      if (valid) {
        for (const auto& [f, sha] : stamp.at("outputs").items()) {
          outs.push_back(f);
          if (!fs::exists(path(f)) || sha256_hex(read_file(path(f))) != sha.get<std::string>()) {
            valid = false;
            break;
          }
        }
      }
      if (valid) {
        spdlog::info("stage {}: artifacts up to date", stage);
        return {stage, true, outs};
      }
      spdlog::info("stage {}: stamp mismatch, recomputing", stage);
    }

    Context ctx(*this, overrides);
    spdlog::info("stage {}: running", stage);
    body->second(ctx);
    json stamp{{"stage", stage},
               {"config_hash", hash_},
               {"seed", config_.scenario.seed},
               {"tool_version", UBERR_VERSION},
               {"overrides", key},
               {"inputs", input_hashes},
               {"outputs", file_hashes(*this, ctx.outputs)}};
    write_file(path(stamp_file), dump(stamp));
    return {stage, false, ctx.outputs};
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::vector<StageOutcome> Pipeline::run_all(const StageOverrides& overrides, bool force) {
  std::vector<StageOutcome> out;
  for (const auto& s : stages()) out.push_back(run(s, overrides, force));
  return out;
}

}  // namespace uberr
