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

#ifndef UBERR_GP_HPP_
#define UBERR_GP_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace uberr {

/// Constant x RBF + White kernel parameters. One lengthscale means a shared
/// (isotropic) lengthscale; otherwise one per input dimension.
struct KernelParams {
  double signal_variance = 1.0;
  std::vector<double> lengthscales{1.0};
  double noise_variance = 1e-4;

  bool per_dimension() const { return lengthscales.size() > 1; }
};

struct ParamBounds {
  double low;
  double high;
};

struct KernelBounds {
  ParamBounds signal_variance{1e-4, 1e2};
  ParamBounds lengthscale{1e-2, 1e2};
  ParamBounds noise_variance{1e-8, 1.0};

  void validate() const;
};

/// signal_variance * exp(-|a - b|^2 / (2 l^2)); no white-noise term.
double kernel_eval(std::span<const double> a, std::span<const double> b, const KernelParams& params);

/// alpha_i = base * ln(1 + mean(w)) / ln(1 + w_i).
std::vector<double> alpha_from_weights(std::span<const double> weights, double base_alpha);

struct PredictiveDistribution {
  double mean = 0.0;
  double std = 0.0;
  bool includes_noise = false;

  double log_density(double observed) const;
};

struct LikelihoodGradient {
  double value = 0.0;
  // d value / d log-parameter: signal, lengthscale(s), noise.
  Eigen::VectorXd gradient;
};

/// Immutable fitted GP. Rows of `inputs` are samples.
class GPModel {
 public:
  /// Factorizes K + diag(alpha) + noise I, escalating jitter from
  /// 1e-10 x mean diagonal by x10 up to 1e-4 x mean diagonal.
  /// Throws FitError when the covariance stays indefinite, InputError on
  /// inconsistent shapes or nonpositive alpha.
  GPModel(Eigen::MatrixXd inputs, Eigen::VectorXd targets, Eigen::VectorXd alpha, KernelParams params);

  const KernelParams& params() const { return params_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return static_cast<std::size_t>(targets_.size()); }
  std::size_t dimension() const { return static_cast<std::size_t>(inputs_.cols()); }

  double log_marginal_likelihood() const;
  LikelihoodGradient log_marginal_likelihood_gradient() const;

  PredictiveDistribution predict(std::span<const double> x, bool include_noise) const;
  std::vector<PredictiveDistribution> predict(const Eigen::MatrixXd& points, bool include_noise) const;

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  Eigen::VectorXd alpha_;
  KernelParams params_;
  double jitter_ = 0.0;
  Eigen::MatrixXd factor_;  // lower Cholesky factor
  Eigen::VectorXd beta_;    // (K + D)^-1 y
};

/// Covariance of the latent function between the rows of a and b.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& params);

struct FitConfig {
  KernelBounds bounds;
  int restarts = 5;
  bool per_dimension_lengthscales = false;
  int max_iterations = 100;
  double tolerance = 1e-7;  // relative change of the objective
};

/// Maximizes the log marginal likelihood over log-parameters with projected
/// L-BFGS and backtracking line search. The first start is a data-driven
/// default; the remaining restarts are drawn log-uniform within the bounds.
/// Throws FitError when every start fails to factorize.
GPModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const Eigen::VectorXd& alpha,
            const FitConfig& config, std::uint64_t seed);

nlohmann::json to_json(const KernelParams& params);
KernelParams kernel_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KernelBounds& bounds);
KernelBounds kernel_bounds_from_json(const nlohmann::json& j);

}  // namespace uberr

#endif  // UBERR_GP_HPP_
