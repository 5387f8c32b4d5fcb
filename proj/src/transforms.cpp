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

#include "uberr/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uberr/errors.hpp"
#include "uberr/ve_builder.hpp"

namespace uberr {
namespace {

double transform_shifted(double xs, double lambda) {
  if (lambda == 0.0) return std::log(xs);
  return std::expm1(lambda * std::log(xs)) / lambda;
}

}  // namespace

double boxcox_log_likelihood(std::span<const double> xs, double lambda) {
  const double n = static_cast<double>(xs.size());
  double sum_log = 0.0, mean = 0.0;
  std::vector<double> y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum_log += std::log(xs[i]);
    y[i] = transform_shifted(xs[i], lambda);
    mean += y[i];
  }
  mean /= n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  return (lambda - 1.0) * sum_log - 0.5 * n * std::log(var);
}

BoxCoxFit boxcox_fit(std::span<const double> values) {
  if (values.size() < 20) throw InputError("boxcox_fit needs at least 20 values");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("boxcox_fit needs finite values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  if (range == 0.0) return {};

  BoxCoxFit fit;
  fit.shift = std::max(0.0, 1e-6 * range - lo);
  std::vector<double> xs(values.begin(), values.end());
  for (double& x : xs) x += fit.shift;

  // Golden-section search for the maximum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -5.0, b = 5.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = boxcox_log_likelihood(xs, c), fd = boxcox_log_likelihood(xs, d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = boxcox_log_likelihood(xs, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = boxcox_log_likelihood(xs, d);
    }
  }
  fit.lambda = 0.5 * (a + b);
  return fit;
}

double boxcox_apply(double x, const BoxCoxFit& fit) {
  if (!fit.lambda) return x;
  const double xs = x + fit.shift;
  if (!(xs > 0.0)) throw InputError("Box-Cox input must be positive after shifting");
  return transform_shifted(xs, *fit.lambda);
}

double boxcox_invert(double y, const BoxCoxFit& fit) {
  if (!fit.lambda) return y;
  const double lambda = *fit.lambda;
  if (lambda == 0.0) return std::exp(y) - fit.shift;
  const double base = lambda * y;
  if (!(base > -1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(std::log1p(base) / lambda) - fit.shift;
}

MinMaxFit minmax_fit(std::span<const double> values) {
  if (values.empty()) throw InputError("minmax_fit of an empty sequence");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi, *hi > *lo};
}

double minmax_apply(double value, const MinMaxFit& fit) {
  return fit.scaled ? (value - fit.min) / (fit.max - fit.min) : value;
}

double minmax_invert(double value, const MinMaxFit& fit) {
  return fit.scaled ? fit.min + value * (fit.max - fit.min) : value;
}

double sample_skewness(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  if (values.size() < 3) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

AttributeTransform fit_attribute(std::span<const double> values, const TransformConfig& config) {
  AttributeTransform t;
  const bool positive = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  if (std::abs(sample_skewness(values)) > config.skew_threshold && (positive || !config.positive_only)) {
    t.boxcox = boxcox_fit(values);
    t.lower = *std::min_element(values.begin(), values.end());
  }
  std::vector<double> transformed(values.begin(), values.end());
  for (double& v : transformed) v = boxcox_apply(v, t.boxcox);
  t.minmax = minmax_fit(transformed);
  return t;
}

const AttributeTransform& TransformSpec::at(const std::string& name) const {
  auto it = attributes_.find(name);
  if (it == attributes_.end()) throw InputError("no transform fitted for '" + name + "'");
  return it->second;
}

TransformSpec fit_transforms(const VEDataset& dataset, std::span<const std::size_t> train_rows,
                             std::span<const std::string> attributes, const TransformConfig& config) {
  TransformSpec spec;
  for (const auto& name : attributes) spec.set(name, fit_attribute(dataset.column(name, train_rows), config));
  return spec;
}

}  // namespace uberr
