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

#ifndef UBERR_EVALUATION_HPP_
#define UBERR_EVALUATION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uberr/gp.hpp"
#include "uberr/transforms.hpp"
#include "uberr/ve_builder.hpp"

namespace uberr {

/// -(1/N) sum log N(t_i; mean_i, std_i^2). Throws InputError on a zero std.
double nlpd(std::span<const PredictiveDistribution> predictions, std::span<const double> observed);
double mse(std::span<const PredictiveDistribution> predictions, std::span<const double> observed);
/// Fraction of observations within mean +/- 1.959964 std.
double coverage95(std::span<const PredictiveDistribution> predictions, std::span<const double> observed);

struct Metrics {
  std::size_t n_test = 0;
  double mse = 0.0;
  double nlpd = 0.0;
  double coverage95 = 0.0;
  // MSE of back-transformed predictive means against raw CV(RMSE).
  double mse_backtransformed = 0.0;
};

struct ModelConfig {
  FitConfig gp;
  double base_alpha = 1e-2;
  TransformConfig transforms;
};

/// Transforms and GP fitted on `train_rows` only.
struct TrainedModel {
  std::vector<std::string> features;
  TransformSpec transforms;
  GPModel model;
  std::vector<std::size_t> train_rows;
};

Eigen::MatrixXd design_matrix(const VEDataset& dataset, std::span<const std::string> features,
                              const TransformSpec& spec, std::span<const std::size_t> rows);
Eigen::VectorXd target_vector(const VEDataset& dataset, const TransformSpec& spec,
                              std::span<const std::size_t> rows);

TrainedModel train_model(const VEDataset& dataset, std::span<const std::string> features,
                         std::span<const std::size_t> train_rows, const ModelConfig& config, std::uint64_t seed);

/// Metrics of `trained` on `rows`, in transformed-scaled target space.
Metrics evaluate_rows(const TrainedModel& trained, const VEDataset& dataset, std::span<const std::size_t> rows);

struct FoldReport {
  std::string fold;  // "random" or the held-out substation id
  Metrics metrics;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
};

struct EvalReport {
  std::string split;  // "interpolation" or "extrapolation"
  std::size_t n_train = 0;
  std::uint64_t seed = 0;
  Metrics overall;  // pooled over all folds
  std::vector<FoldReport> folds;

  // Per-metric extremes over folds.
  Metrics fold_min() const;
  Metrics fold_max() const;
};

/// Random training subset of size n and a disjoint validation subset of size
/// min(n, N - n). Throws InputError when n < 2 or N - n < 1.
EvalReport interpolation_eval(const VEDataset& dataset, std::size_t n, std::span<const std::string> features,
                              const ModelConfig& config, std::uint64_t seed);

/// Leave-one-substation-out folds; metrics pooled over folds.
EvalReport extrapolation_eval(const VEDataset& dataset, std::size_t n, std::span<const std::string> features,
                              const ModelConfig& config, std::uint64_t seed);

struct SweepOptions {
  bool interpolation = true;
  bool extrapolation = true;
};

struct MetricSummary {
  Metrics mean;
  Metrics spread;  // population standard deviation across seeds
};

MetricSummary summarize(std::span<const EvalReport> reports);

struct SweepPoint {
  std::size_t axis_value = 0;
  std::vector<std::string> features;
  std::vector<EvalReport> interpolation;  // one per seed
  std::vector<EvalReport> extrapolation;
};

struct SweepResult {
  std::string axis;  // "sample_size" or "feature_count"
  std::vector<std::uint64_t> seeds;
  std::vector<SweepPoint> points;
};

SweepResult sweep_size(const VEDataset& dataset, std::span<const std::size_t> sizes,
                       std::span<const std::string> features, const ModelConfig& config,
                       std::span<const std::uint64_t> seeds, const SweepOptions& options = {});

/// Point k uses the first k entries of `ordering`.
SweepResult sweep_features(const VEDataset& dataset, std::span<const std::string> ordering,
                           std::span<const std::size_t> ks, std::size_t n, const ModelConfig& config,
                           std::span<const std::uint64_t> seeds, const SweepOptions& options = {});

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const SweepResult& r);
// One row per split x axis value x seed.
std::string sweep_csv(const SweepResult& r);

}  // namespace uberr

#endif  // UBERR_EVALUATION_HPP_
