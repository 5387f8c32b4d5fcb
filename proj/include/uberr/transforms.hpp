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

#ifndef UBERR_TRANSFORMS_HPP_
#define UBERR_TRANSFORMS_HPP_

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uberr {

struct VEDataset;

/// Box-Cox parameters. An absent lambda means no power transform.
struct BoxCoxFit {
  double shift = 0.0;
  std::optional<double> lambda;
};

/// Box-Cox profile log-likelihood (lambda - 1) sum ln x - n/2 ln var(y).
double boxcox_log_likelihood(std::span<const double> shifted_values, double lambda);

/// Maximum-likelihood lambda over [-5, 5] by golden-section search (tol 1e-6).
/// shift = max(0, eps - min) with eps = 1e-6 * range keeps every value
/// strictly positive. Constant input yields the identity (no lambda).
/// Throws InputError for fewer than 20 values or non-finite input.
BoxCoxFit boxcox_fit(std::span<const double> values);

/// ((x + shift)^lambda - 1) / lambda, or ln(x + shift) at lambda = 0.
/// Throws InputError when x + shift <= 0.
double boxcox_apply(double x, const BoxCoxFit& fit);
// Exact inverse; NaN when y lies outside the image of the transform.
double boxcox_invert(double y, const BoxCoxFit& fit);

struct MinMaxFit {
  double min = 0.0;
  double max = 1.0;
  bool scaled = true;  // false when max == min: values pass through unchanged
};

MinMaxFit minmax_fit(std::span<const double> values);
// (v - min) / (max - min), no clamping.
double minmax_apply(double value, const MinMaxFit& fit);
double minmax_invert(double value, const MinMaxFit& fit);

/// Box-Cox then min-max for one attribute. With a power transform, inputs
/// below the training minimum `lower` are clamped to it first.
struct AttributeTransform {
  BoxCoxFit boxcox;
  MinMaxFit minmax;
  double lower = -std::numeric_limits<double>::infinity();

  double forward(double x) const {
    return minmax_apply(boxcox_apply(boxcox.lambda ? std::max(x, lower) : x, boxcox), minmax);
  }
  double inverse(double y) const { return boxcox_invert(minmax_invert(y, minmax), boxcox); }
};

struct TransformConfig {
  // Power transform only attributes this skewed (|sample skewness|) ...
  double skew_threshold = 0.5;
  // ... and, by default, only strictly positive ones so that held-out values
  // stay inside the transform's domain.
  bool positive_only = true;
};

double sample_skewness(std::span<const double> values);

AttributeTransform fit_attribute(std::span<const double> values, const TransformConfig& config = {});

/// Fitted transforms keyed by attribute name (features and "target_cvrmse").
class TransformSpec {
 public:
  void set(const std::string& name, AttributeTransform t) { attributes_[name] = t; }
  bool contains(const std::string& name) const { return attributes_.count(name) > 0; }
  const AttributeTransform& at(const std::string& name) const;
  double forward(const std::string& name, double x) const { return at(name).forward(x); }
  double inverse(const std::string& name, double y) const { return at(name).inverse(y); }
  const std::map<std::string, AttributeTransform>& attributes() const { return attributes_; }

 private:
  std::map<std::string, AttributeTransform> attributes_;
};

/// Fits one transform per attribute using only `train_rows`.
TransformSpec fit_transforms(const VEDataset& dataset, std::span<const std::size_t> train_rows,
                             std::span<const std::string> attributes, const TransformConfig& config = {});

}  // namespace uberr

#endif  // UBERR_TRANSFORMS_HPP_
