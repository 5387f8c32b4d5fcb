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

#include <cstdlib>
#include <filesystem>
#include <numeric>

#include "uberr/artifacts.hpp"
#include "uberr/config.hpp"
#include "uberr/errors.hpp"
#include "uberr/pipeline.hpp"

namespace uberr {
namespace {

namespace fs = std::filesystem;

const char* kTinyConfig = R"(
[scenario]
substations = 3
days = 21
[calibration]
candidates = 20
[gp]
restarts = 1
max_iterations = 40
features = 2
n = 40
[eval]
sizes = 20,40
n = 40
k_max = 3
seeds = 1,2
[grid]
resolution = 6
)";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uberr_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = parse_config("");
  EXPECT_EQ(c.scenario.substations, 15);
  EXPECT_EQ(c.calibration.candidates, 1000);
  EXPECT_EQ(c.eval.sizes.back(), 3000u);
  const auto t = parse_config(kTinyConfig);
  EXPECT_EQ(t.scenario.days, 21);
  EXPECT_EQ(t.eval.seeds, (std::vector<std::uint64_t>{1, 2}));
  const auto again = parse_config(canonical_text(t));
  EXPECT_EQ(canonical_text(again), canonical_text(t));
  EXPECT_EQ(config_hash(again), config_hash(t));
  EXPECT_NE(config_hash(t), config_hash(c));
  EXPECT_EQ(config_hash(parse_config(config_reference())), config_hash(c));
}

TEST(Config, RejectsUnknownAndInvalid) {
  EXPECT_THROW(parse_config("[scenario]\nsubstationz = 3\n"), InputError);
  EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), InputError);
  EXPECT_THROW(parse_config("[scenario]\ndays = -4\n"), InputError);
  EXPECT_THROW(parse_config("[calibration]\nua_per_m2 = 3,1\n"), InputError);
  EXPECT_THROW(parse_config("[eval]\nsizes = 500,250\n"), InputError);
  EXPECT_THROW(parse_config("[features]\nga_mode = sideways\n"), InputError);
  try {
    parse_config("[gp]\nrestarts = lots\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("restarts"), std::string::npos);
  }
}

TEST(Config, EnvironmentOverrides) {
  auto c = parse_config("");
  ::setenv("UBERR_SCENARIO_SUBSTATIONS", "4", 1);
  const auto applied = apply_env_overrides(c);
  ::unsetenv("UBERR_SCENARIO_SUBSTATIONS");
  EXPECT_EQ(c.scenario.substations, 4);
  ASSERT_EQ(applied.size(), 1u);
}

TEST(Config, SeasonsAndHash) {
  const auto c = parse_config("[ve]\nseasons = w1:2020-10-01:2021-05-31\n");
  const auto s = effective_seasons(c);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].label, "w1");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Artifacts, DoubleFormattingRoundTrips) {
  for (double v : {0.0, -1.5, 0.1, 1e-300, 123456.789, 2.0 / 3.0}) EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_THROW(parse_double("1.2x"), InputError);
}

TEST(Artifacts, MeasurementWeatherMaskRoundTrip) {
  ScenarioConfig cfg;
  cfg.substations = 1;
  cfg.days = 14;
  const auto sc = make_scenario(cfg);
  const auto m = synthesize_substation(sc, 0);
  const auto back = parse_measurements_csv(measurements_csv(m));
  EXPECT_EQ(back.id, m.id);
  ASSERT_TRUE(back.heat_power.aligned_with(m.heat_power));
  for (std::size_t i = 0; i < m.heat_power.size(); ++i) {
    EXPECT_EQ(back.heat_power[i], m.heat_power[i]);
    EXPECT_EQ(back.flow[i], m.flow[i]);
    EXPECT_EQ(back.return_temp[i], m.return_temp[i]);
  }
  const auto w = parse_weather_csv(weather_csv(sc.weather));
  for (std::size_t i = 0; i < w.temperature.size(); ++i) EXPECT_EQ(w.temperature[i], sc.weather.temperature[i]);
  CleaningMask mask(m.heat_power.size());
  mask.reject(3, RejectReason::outlier_3sigma);
  mask.reject(40, RejectReason::atypical_hdd);
  const auto mb = parse_mask_csv(mask_csv(m.id, m.heat_power.start(), mask));
  ASSERT_EQ(mb.size(), mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) EXPECT_EQ(mb.reason(i), mask.reason(i));
  EXPECT_EQ(mask_csv(m.id, m.heat_power.start(), mask).substr(0, 35), "substation_id,timestamp,keep,reason");
}

TEST(Artifacts, JsonRoundTrips) {
  CalibrationResult r;
  r.substation_id = "S07";
  r.window = {make_date(2021, 3, 1)};
  r.selected_params.ua = 1234.5;
  r.calibration_error = 0.123;
  r.candidate_count = 10;
  r.selected_index = 4;
  const auto b = calibration_from_json(to_json(r));
  EXPECT_EQ(b.substation_id, r.substation_id);
  EXPECT_EQ(b.window.start, r.window.start);
  EXPECT_EQ(b.selected_params, r.selected_params);
  EXPECT_EQ(b.calibration_error, r.calibration_error);
  EXPECT_EQ(b.selected_index, 4);

  TransformSpec spec;
  spec.set("a", {{0.5, 0.25}, {0.1, 0.9, true}, 0.75});
  spec.set("b", {{0.0, std::nullopt}, {2.0, 2.0, false}});
  const auto sb = transform_spec_from_json(to_json(spec));
  EXPECT_EQ(sb.at("a").boxcox.lambda, 0.25);
  EXPECT_EQ(sb.at("a").lower, 0.75);
  EXPECT_FALSE(sb.at("b").boxcox.lambda.has_value());
  EXPECT_FALSE(sb.at("b").minmax.scaled);
  EXPECT_EQ(sb.forward("a", 3.0), spec.forward("a", 3.0));

  SelectionReport rep;
  rep.selected = {{"x", FeatureGroup::boundary, 0.4}};
  rep.ranking = rep.selected;
  rep.exclusions = {{"y", "x", 0.95}};
  rep.ordering = {"x"};
  const auto rb = selection_from_json(to_json(rep));
  EXPECT_EQ(rb.ordering, rep.ordering);
  EXPECT_EQ(rb.exclusions.front().conflicting, "x");
}

class PipelineRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_a_ = new fs::path(fresh_dir("a"));
    Pipeline p(parse_config(kTinyConfig), dir_a_->string());
    first_ = new std::vector<StageOutcome>(p.run_all());
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_a_);
    delete dir_a_;
    delete first_;
  }
  static fs::path* dir_a_;
  static std::vector<StageOutcome>* first_;
};
fs::path* PipelineRun::dir_a_ = nullptr;
std::vector<StageOutcome>* PipelineRun::first_ = nullptr;

TEST_F(PipelineRun, AllStagesProduceOutputs) {
  ASSERT_EQ(first_->size(), Pipeline::stages().size());
  for (const auto& o : *first_) {
    EXPECT_FALSE(o.reused) << o.stage;
    EXPECT_FALSE(o.outputs.empty()) << o.stage;
    for (const auto& f : o.outputs) EXPECT_TRUE(fs::exists(*dir_a_ / f)) << f;
  }
  EXPECT_TRUE(fs::exists(*dir_a_ / "ve_dataset.csv"));
  EXPECT_TRUE(fs::exists(*dir_a_ / "model.json"));
  EXPECT_TRUE(fs::exists(*dir_a_ / "stamps" / "train.json"));
}

TEST_F(PipelineRun, RerunReusesAndForceRecomputes) {
  Pipeline p(parse_config(kTinyConfig), dir_a_->string());
  for (const auto& o : p.run_all()) EXPECT_TRUE(o.reused) << o.stage;
  EXPECT_FALSE(p.run("grid", {}, true).reused);
  const auto copy = fresh_dir("copy");
  fs::copy(*dir_a_, copy, fs::copy_options::recursive);
  Pipeline same(parse_config(kTinyConfig), copy.string());
  EXPECT_TRUE(same.run("calibrate").reused);
  Pipeline changed(parse_config(std::string(kTinyConfig) + "[grid]\nband_sigma = 1\n"), copy.string());
  EXPECT_FALSE(changed.run("synth").reused);
  fs::remove_all(copy);
}

TEST_F(PipelineRun, TamperedOutputIsRecomputed) {
  Pipeline p(parse_config(kTinyConfig), dir_a_->string());
  const auto before = read_file((*dir_a_ / "selection.json").string());
  write_file((*dir_a_ / "selection.json").string(), "{}");
  EXPECT_FALSE(p.run("select").reused);
  EXPECT_EQ(read_file((*dir_a_ / "selection.json").string()), before);
}

TEST_F(PipelineRun, ByteIdenticalAcrossRuns) {
  const auto dir_b = fresh_dir("b");
  Pipeline p(parse_config(kTinyConfig), dir_b.string());
  p.run_all();
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(*dir_a_)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), *dir_a_);
    ASSERT_TRUE(fs::exists(dir_b / rel)) << rel;
    EXPECT_EQ(read_file(e.path().string()), read_file((dir_b / rel).string())) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 10u);
  fs::remove_all(dir_b);
}

TEST_F(PipelineRun, ModelReloadsExactly) {
  const auto ve = parse_ve(read_file((*dir_a_ / "ve_dataset.csv").string()),
                           nlohmann::json::parse(read_file((*dir_a_ / "ve_dataset.json").string())));
  ve.validate();
  const auto j = nlohmann::json::parse(read_file((*dir_a_ / "model.json").string()));
  const auto m = load_model(j, ve);
  EXPECT_EQ(m.features.size(), 2u);
  EXPECT_EQ(m.train_rows.size(), 40u);
  EXPECT_EQ(dump(model_json(m, kernel_bounds_from_json(j.at("bounds")), j.at("dataset").at("file"),
                            j.at("dataset").at("sha256"), provenance_from_json(j.at("provenance")))),
            read_file((*dir_a_ / "model.json").string()));
}

TEST(PipelineErrors, MissingDependencyNamesTheStage) {
  const auto dir = fresh_dir("missing");
  Pipeline p(parse_config(kTinyConfig), dir.string());
  try {
    p.run("train");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "train");
    const std::string msg = e.what();
    EXPECT_NE(msg.find("missing input"), std::string::npos) << msg;
    EXPECT_NE(msg.find("first"), std::string::npos) << msg;
  }
  EXPECT_THROW(p.run("no-such-stage"), StageError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace uberr
