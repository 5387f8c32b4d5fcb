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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "uberr/artifacts.hpp"
#include "uberr/config.hpp"
#include "uberr/errors.hpp"
#include "uberr/pipeline.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "uberr_out";
  std::string stage;
  std::string features;
  std::optional<std::size_t> n;
  std::string split;
  std::string k;
  bool force = false;
  bool verbose = false;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size() && !s.empty()) {
    const auto next = s.find(',', pos);
    out.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// "9", "1..9" or "1-9".
std::pair<std::size_t, std::size_t> parse_k(const std::string& k) {
  auto sep = k.find("..");
  std::size_t width = 2;
  if (sep == std::string::npos) {
    sep = k.find('-');
    width = 1;
  }
  try {
    if (sep == std::string::npos) {
      const auto v = std::stoul(k);
      return {v, v};
    }
    return {std::stoul(k.substr(0, sep)), std::stoul(k.substr(sep + width))};
  } catch (const std::exception&) {
    throw uberr::InputError("--k must look like 9 or 1..9, got '" + k + "'");
  }
}

uberr::RunConfig load(const Options& o) {
  uberr::RunConfig c = o.config_path.empty() ? uberr::RunConfig{} : uberr::load_config(o.config_path);
  for (const auto& v : uberr::apply_env_overrides(c)) spdlog::info("config override from {}", v);
  if (o.seed) c.scenario.seed = *o.seed;
  return c;
}

uberr::StageOverrides overrides(const Options& o) {
  uberr::StageOverrides s;
  if (!o.features.empty()) s.features = split_commas(o.features);
  s.n = o.n;
  if (!o.split.empty()) s.split = o.split;
  if (!o.k.empty()) {
    const auto [a, b] = parse_k(o.k);
    s.k_min = a;
    s.k_max = b;
  }
  return s;
}

void print_table(const json& report) {
  const auto& r = report.at("report");
  std::printf("%s (n_train = %zu, seed = %llu)\n", r.at("split").get<std::string>().c_str(),
              r.at("n_train").get<std::size_t>(), static_cast<unsigned long long>(r.at("seed").get<std::uint64_t>()));
  std::printf("%-10s %10s %10s %10s\n", "", "Overall", "Min", "Max");
  for (const auto& [label, key] : {std::pair{"MSE", "mse"}, {"Coverage", "coverage95"}, {"NLPD", "nlpd"}}) {
    std::printf("%-10s %10.4f %10.4f %10.4f\n", label, r.at("overall").at(key).get<double>(),
                r.at("min").at(key).get<double>(), r.at("max").at(key).get<double>());
  }
}

void print_outcome(const uberr::StageOutcome& o) {
  std::printf("%s: %s (%zu artifacts)\n", o.stage.c_str(), o.reused ? "reused" : "done", o.outputs.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process models of urban building energy model error structure"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UBERR_VERSION));
  Options o;
  app.add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "override scenario.seed");
  app.add_option("--out-dir", o.out_dir, "artifact directory")->capture_default_str();
  app.add_flag("--force", o.force, "recompute even when stamps match");
  app.add_flag("-v,--verbose", o.verbose, "log progress");

  const std::vector<std::string> stage_cmds = {"synth", "clean", "calibrate", "build-ve", "select", "train",
                                               "eval", "sweep-size", "sweep-features", "grid"};
  for (const auto& name : stage_cmds) {
    auto* sub = app.add_subcommand(name, "run the " + name + " stage");
    if (name == "train" || name == "sweep-size") {
      sub->add_option("--features", o.features, "comma-separated feature list");
    }
    if (name == "train" || name == "eval" || name == "sweep-features") {
      sub->add_option("--n", o.n, "training sample size");
    }
    if (name == "eval" || name == "sweep-size" || name == "sweep-features") {
      sub->add_option("--split", o.split, "interpolation, extrapolation or both")
          ->check(CLI::IsMember({"interpolation", "extrapolation", "both"}));
    }
    if (name == "sweep-features") sub->add_option("--k", o.k, "feature counts, e.g. 1..9");
  }
  auto* pipeline = app.add_subcommand("pipeline", "run every stage from synth to grid");
  pipeline->add_option("--stage", o.stage, "run a single stage")->check(CLI::IsMember(uberr::Pipeline::stages()));
  pipeline->add_option("--features", o.features, "comma-separated model features");
  pipeline->add_option("--n", o.n, "training sample size");
  pipeline->add_option("--split", o.split, "evaluation split");
  auto* config = app.add_subcommand("config", "configuration utilities");
  config->require_subcommand(1);
  config->add_subcommand("reference", "print every key with its default");
  config->add_subcommand("show", "print the effective configuration and its hash");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(o.verbose ? spdlog::level::info : spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");

  std::string stage = "config";
  try {
    if (config->parsed()) {
      if (config->got_subcommand("reference")) {
        std::cout << uberr::config_reference();
      } else {
        const auto c = load(o);
        std::cout << "# config hash " << uberr::config_hash(c) << "\n" << uberr::canonical_text(c);
      }
      return 0;
    }
    uberr::Pipeline p(load(o), o.out_dir);
    const auto ov = overrides(o);
    if (pipeline->parsed()) {
      stage = o.stage.empty() ? "pipeline" : o.stage;
      if (!o.stage.empty()) {
        print_outcome(p.run(o.stage, ov, o.force));
      } else {
        for (const auto& r : p.run_all(ov, o.force)) print_outcome(r);
      }
      return 0;
    }
    for (const auto& name : stage_cmds) {
      if (!app.got_subcommand(name)) continue;
      stage = name;
      const auto outcome = p.run(name, ov, o.force);
      print_outcome(outcome);
      if (name == "eval") {
        for (const auto& f : outcome.outputs) print_table(json::parse(uberr::read_file(p.path(f))));
      }
    }
    return 0;
  } catch (const uberr::StageError& e) {
    std::cerr << json{{"error", {{"stage", e.stage()}, {"message", e.cause()}}}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"stage", stage}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }
}
