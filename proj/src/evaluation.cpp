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

#include "uberr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "uberr/errors.hpp"
#include "uberr/synthetic.hpp"

namespace uberr {
namespace {

constexpr double kZ95 = 1.959964;

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw InputError("predictions and observations differ in length");
  if (a == 0) throw InputError("no predictions to score");
}

std::vector<std::size_t> sample_rows(std::vector<std::size_t> pool, std::size_t n, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(n, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

struct Scored {
  std::vector<PredictiveDistribution> predictions;
  std::vector<double> observed;
  std::vector<double> predicted_raw;
  std::vector<double> observed_raw;
};

Scored score_rows(const TrainedModel& t, const VEDataset& dataset, std::span<const std::size_t> rows) {
  Scored s;
  const Eigen::MatrixXd x = design_matrix(dataset, t.features, t.transforms, rows);
  const Eigen::VectorXd y = target_vector(dataset, t.transforms, rows);
  s.predictions = t.model.predict(x, true);
  s.observed.assign(y.data(), y.data() + y.size());
  s.observed_raw = dataset.column("target_cvrmse", rows);
  const auto& tt = t.transforms.at("target_cvrmse");
  for (const auto& p : s.predictions) s.predicted_raw.push_back(tt.inverse(p.mean));
  return s;
}

Metrics metrics_of(const Scored& s) {
  Metrics m;
  m.n_test = s.observed.size();
  m.mse = mse(s.predictions, s.observed);
  m.nlpd = nlpd(s.predictions, s.observed);
  m.coverage95 = coverage95(s.predictions, s.observed);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.observed_raw.size(); ++i) {
    if (!std::isfinite(s.predicted_raw[i])) continue;
    const double d = s.predicted_raw[i] - s.observed_raw[i];
    acc += d * d;
    ++count;
  }
  m.mse_backtransformed = count ? acc / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  return m;
}

template <typename F>
Metrics fold_extreme(const std::vector<FoldReport>& folds, F pick) {
  Metrics out;
  if (folds.empty()) return out;
  out = folds.front().metrics;
  for (const auto& f : folds) {
    out.n_test = pick(out.n_test, f.metrics.n_test);
    out.mse = pick(out.mse, f.metrics.mse);
    out.nlpd = pick(out.nlpd, f.metrics.nlpd);
    out.coverage95 = pick(out.coverage95, f.metrics.coverage95);
    out.mse_backtransformed = pick(out.mse_backtransformed, f.metrics.mse_backtransformed);
  }
  return out;
}

}  // namespace

double nlpd(std::span<const PredictiveDistribution> predictions, std::span<const double> observed) {
  check_lengths(predictions.size(), observed.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) acc -= predictions[i].log_density(observed[i]);
  return acc / static_cast<double>(observed.size());
}

double mse(std::span<const PredictiveDistribution> predictions, std::span<const double> observed) {
  check_lengths(predictions.size(), observed.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = predictions[i].mean - observed[i];
    acc += d * d;
  }
  return acc / static_cast<double>(observed.size());
}

double coverage95(std::span<const PredictiveDistribution> predictions, std::span<const double> observed) {
  check_lengths(predictions.size(), observed.size());
  std::size_t inside = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (std::abs(observed[i] - predictions[i].mean) <= kZ95 * predictions[i].std) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(observed.size());
}

Eigen::MatrixXd design_matrix(const VEDataset& dataset, std::span<const std::string> features,
                              const TransformSpec& spec, std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) {
    const auto col = dataset.column(features[k], rows);
    const auto& t = spec.at(features[k]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = t.forward(col[i]);
    }
  }
  return x;
}

Eigen::VectorXd target_vector(const VEDataset& dataset, const TransformSpec& spec,
                              std::span<const std::size_t> rows) {
  const auto col = dataset.column("target_cvrmse", rows);
  const auto& t = spec.at("target_cvrmse");
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = t.forward(col[i]);
  return y;
}

TrainedModel train_model(const VEDataset& dataset, std::span<const std::string> features,
                         std::span<const std::size_t> train_rows, const ModelConfig& config, std::uint64_t seed) {
  if (features.empty()) throw InputError("at least one feature is required");
  if (train_rows.size() < 2) throw InputError("at least two training rows are required");
  std::vector<std::string> attributes(features.begin(), features.end());
  attributes.push_back("target_cvrmse");
  TransformSpec spec = fit_transforms(dataset, train_rows, attributes, config.transforms);
  const Eigen::MatrixXd x = design_matrix(dataset, features, spec, train_rows);
  const Eigen::VectorXd y = target_vector(dataset, spec, train_rows);
  const auto w = dataset.weights(train_rows);
  const auto a = alpha_from_weights(w, config.base_alpha);
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  GPModel model = fit(x, y, alpha, config.gp, seed);
  return {std::vector<std::string>(features.begin(), features.end()), std::move(spec), std::move(model),
          std::vector<std::size_t>(train_rows.begin(), train_rows.end())};
}

Metrics evaluate_rows(const TrainedModel& trained, const VEDataset& dataset, std::span<const std::size_t> rows) {
  return metrics_of(score_rows(trained, dataset, rows));
}

Metrics EvalReport::fold_min() const {
  return fold_extreme(folds, [](auto a, auto b) { return std::min(a, b); });
}

Metrics EvalReport::fold_max() const {
  return fold_extreme(folds, [](auto a, auto b) { return std::max(a, b); });
}

EvalReport interpolation_eval(const VEDataset& dataset, std::size_t n, std::span<const std::string> features,
                              const ModelConfig& config, std::uint64_t seed) {
  const std::size_t total = dataset.size();
  if (n < 2) throw InputError("training size must be at least 2");
  if (total <= n) {
    throw InputError("dataset has " + std::to_string(total) + " samples, too few for training size " +
                     std::to_string(n));
  }
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::size_t> train(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
  const std::size_t n_val = std::min(n, total - n);
  std::vector<std::size_t> val(all.begin() + static_cast<std::ptrdiff_t>(n),
                               all.begin() + static_cast<std::ptrdiff_t>(n + n_val));
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());

  const TrainedModel t = train_model(dataset, features, train, config, derive_seed(seed, 1));
  EvalReport r;
  r.split = "interpolation";
  r.n_train = n;
  r.seed = seed;
  r.overall = evaluate_rows(t, dataset, val);
  r.folds.push_back({"random", r.overall, std::move(train), std::move(val)});
  return r;
}

EvalReport extrapolation_eval(const VEDataset& dataset, std::size_t n, std::span<const std::string> features,
                              const ModelConfig& config, std::uint64_t seed) {
  const auto ids = dataset.substations();
  if (ids.size() < 2) throw InputError("extrapolation needs at least two substations");
  if (n < 2) throw InputError("training size must be at least 2");
  std::map<std::string, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_id[dataset.samples[i].pair.substation_id].push_back(i);

  EvalReport r;
  r.split = "extrapolation";
  r.n_train = n;
  r.seed = seed;
  Scored pooled;
  for (std::size_t f = 0; f < ids.size(); ++f) {
    const auto& id = ids[f];
    const auto& held = by_id[id];
    if (held.empty()) {
      spdlog::warn("substation {} has no samples; fold skipped", id);
      continue;
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.samples[i].pair.substation_id != id) pool.push_back(i);
    }
    if (pool.size() < n) spdlog::warn("fold {}: only {} training rows available for n = {}", id, pool.size(), n);
    std::mt19937_64 rng(derive_seed(seed, 2 * f + 2));
    auto train = sample_rows(pool, n, rng);
    auto val = sample_rows(held, n, rng);
    const TrainedModel t = train_model(dataset, features, train, config, derive_seed(seed, 2 * f + 3));
    Scored s = score_rows(t, dataset, val);
    r.folds.push_back({id, metrics_of(s), std::move(train), std::move(val)});
    pooled.predictions.insert(pooled.predictions.end(), s.predictions.begin(), s.predictions.end());
    pooled.observed.insert(pooled.observed.end(), s.observed.begin(), s.observed.end());
    pooled.predicted_raw.insert(pooled.predicted_raw.end(), s.predicted_raw.begin(), s.predicted_raw.end());
    pooled.observed_raw.insert(pooled.observed_raw.end(), s.observed_raw.begin(), s.observed_raw.end());
  }
  r.overall = metrics_of(pooled);
  return r;
}

MetricSummary summarize(std::span<const EvalReport> reports) {
  MetricSummary s;
  if (reports.empty()) return s;
  const double k = static_cast<double>(reports.size());
  auto stat = [&](auto get, double& mean, double& spread) {
    double m = 0.0;
    for (const auto& r : reports) m += get(r.overall);
    m /= k;
    double v = 0.0;
    for (const auto& r : reports) v += (get(r.overall) - m) * (get(r.overall) - m);
    mean = m;
    spread = std::sqrt(v / k);
  };
  stat([](const Metrics& m) { return m.mse; }, s.mean.mse, s.spread.mse);
  stat([](const Metrics& m) { return m.nlpd; }, s.mean.nlpd, s.spread.nlpd);
  stat([](const Metrics& m) { return m.coverage95; }, s.mean.coverage95, s.spread.coverage95);
  stat([](const Metrics& m) { return m.mse_backtransformed; }, s.mean.mse_backtransformed,
       s.spread.mse_backtransformed);
  s.mean.n_test = reports.front().overall.n_test;
  return s;
}

namespace {

SweepPoint run_point(const VEDataset& dataset, std::size_t axis_value, std::size_t n,
                     std::span<const std::string> features, const ModelConfig& config,
                     std::span<const std::uint64_t> seeds, const SweepOptions& options) {
  SweepPoint p;
  p.axis_value = axis_value;
  p.features.assign(features.begin(), features.end());
  for (std::uint64_t seed : seeds) {
    if (options.interpolation) p.interpolation.push_back(interpolation_eval(dataset, n, features, config, seed));
    if (options.extrapolation) p.extrapolation.push_back(extrapolation_eval(dataset, n, features, config, seed));
  }
  return p;
}

void check_axis(std::span<const std::size_t> values) {
  if (values.empty()) throw InputError("sweep axis is empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) throw InputError("sweep axis values must be strictly increasing");
  }
}

}  // namespace

SweepResult sweep_size(const VEDataset& dataset, std::span<const std::size_t> sizes,
                       std::span<const std::string> features, const ModelConfig& config,
                       std::span<const std::uint64_t> seeds, const SweepOptions& options) {
  check_axis(sizes);
  SweepResult r{"sample_size", {seeds.begin(), seeds.end()}, {}};
  for (std::size_t n : sizes) {
    spdlog::info("sweep-size: n = {}", n);
    r.points.push_back(run_point(dataset, n, n, features, config, seeds, options));
  }
  return r;
}

SweepResult sweep_features(const VEDataset& dataset, std::span<const std::string> ordering,
                           std::span<const std::size_t> ks, std::size_t n, const ModelConfig& config,
                           std::span<const std::uint64_t> seeds, const SweepOptions& options) {
  check_axis(ks);
  if (ks.front() < 1 || ks.back() > ordering.size()) throw InputError("feature count outside the ordering");
  SweepResult r{"feature_count", {seeds.begin(), seeds.end()}, {}};
  for (std::size_t k : ks) {
    spdlog::info("sweep-features: k = {}", k);
    r.points.push_back(run_point(dataset, k, n, ordering.first(k), config, seeds, options));
  }
  return r;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"n_test", m.n_test},
          {"mse", m.mse},
          {"nlpd", m.nlpd},
          {"coverage95", m.coverage95},
          {"mse_backtransformed", m.mse_backtransformed}};
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"metrics", to_json(f.metrics)},
                     {"train_rows", f.train_rows},
                     {"validation_rows", f.validation_rows}});
  }
  return {{"split", r.split},       {"n_train", r.n_train},         {"seed", r.seed},
          {"overall", to_json(r.overall)}, {"min", to_json(r.fold_min())}, {"max", to_json(r.fold_max())},
          {"folds", folds}};
}

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json jp{{"axis_value", p.axis_value}, {"features", p.features}};
    for (const auto& [name, reports] : {std::pair{"interpolation", &p.interpolation},
                                        std::pair{"extrapolation", &p.extrapolation}}) {
      if (reports->empty()) continue;
      const auto s = summarize(*reports);
      nlohmann::json per_seed = nlohmann::json::array();
      for (const auto& rep : *reports) per_seed.push_back({{"seed", rep.seed}, {"overall", to_json(rep.overall)}});
      jp[name] = {{"mean", to_json(s.mean)}, {"spread", to_json(s.spread)}, {"per_seed", per_seed}};
    }
    points.push_back(std::move(jp));
  }
  return {{"axis", r.axis}, {"seeds", r.seeds}, {"points", points}};
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "axis,axis_value,split,seed,n_test,mse,nlpd,coverage95\n";
  for (const auto& p : r.points) {
    for (const auto* reports : {&p.interpolation, &p.extrapolation}) {
      for (const auto& rep : *reports) {
        out << r.axis << ',' << p.axis_value << ',' << rep.split << ',' << rep.seed << ',' << rep.overall.n_test
            << ',' << rep.overall.mse << ',' << rep.overall.nlpd << ',' << rep.overall.coverage95 << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace uberr
