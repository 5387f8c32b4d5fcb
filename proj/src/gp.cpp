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

#include "uberr/gp.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double lengthscale_for(const KernelParams& p, Eigen::Index dim) {
  return p.per_dimension() ? p.lengthscales[static_cast<std::size_t>(dim)] : p.lengthscales.front();
}

void check_params(const KernelParams& p, Eigen::Index dim) {
  if (!(p.signal_variance > 0.0)) throw InputError("signal_variance must be positive");
  if (!(p.noise_variance >= 0.0)) throw InputError("noise_variance must be nonnegative");
  if (p.lengthscales.empty()) throw InputError("at least one lengthscale is required");
  if (p.per_dimension() && static_cast<Eigen::Index>(p.lengthscales.size()) != dim) {
    throw InputError("per-dimension lengthscales must match the input dimension");
  }
  for (double l : p.lengthscales) {
    if (!(l > 0.0)) throw InputError("lengthscales must be positive");
  }
}

// Scaled squared distance matrix between rows of a and b.
Eigen::MatrixXd scaled_sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
  Eigen::MatrixXd as = a, bs = b;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double l = lengthscale_for(p, k);
    as.col(k) /= l;
    bs.col(k) /= l;
  }
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (as.row(i) - bs.row(j)).squaredNorm();
  }
  return d;
}

}  // namespace

void KernelBounds::validate() const {
  for (const auto* b : {&signal_variance, &lengthscale, &noise_variance}) {
    if (!(b->low > 0.0) || !(b->high >= b->low)) throw InputError("kernel bounds must satisfy 0 < low <= high");
  }
}

double kernel_eval(std::span<const double> a, std::span<const double> b, const KernelParams& params) {
  if (a.size() != b.size()) throw InputError("kernel_eval dimension mismatch");
  check_params(params, static_cast<Eigen::Index>(a.size()));
  double r2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / lengthscale_for(params, static_cast<Eigen::Index>(k));
    r2 += d * d;
  }
  return params.signal_variance * std::exp(-0.5 * r2);
}

std::vector<double> alpha_from_weights(std::span<const double> weights, double base_alpha) {
  if (!(base_alpha > 0.0)) throw InputError("base_alpha must be positive");
  if (weights.empty()) return {};
  double mean = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InputError("weights must be positive");
    mean += w;
  }
  mean /= static_cast<double>(weights.size());
  const double anchor = std::log1p(mean);
  std::vector<double> out;
  out.reserve(weights.size());
  for (double w : weights) out.push_back(base_alpha * anchor / std::log1p(w));
  return out;
}

double PredictiveDistribution::log_density(double observed) const {
  if (!(std > 0.0)) throw InputError("predictive std must be positive");
  const double z = (observed - mean) / std;
  return -0.5 * (kLog2Pi + z * z) - std::log(std);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& params) {
  if (a.cols() != b.cols()) throw InputError("kernel_matrix dimension mismatch");
  check_params(params, a.cols());
  return params.signal_variance * (-0.5 * scaled_sqdist(a, b, params).array()).exp().matrix();
}

GPModel::GPModel(Eigen::MatrixXd inputs, Eigen::VectorXd targets, Eigen::VectorXd alpha, KernelParams params)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), alpha_(std::move(alpha)), params_(std::move(params)) {
  const Eigen::Index n = inputs_.rows();
  if (n < 1) throw InputError("GP needs at least one training sample");
  if (targets_.size() != n || alpha_.size() != n) throw InputError("GP inputs, targets and alpha differ in length");
  if (!inputs_.allFinite() || !targets_.allFinite()) throw InputError("GP training data must be finite");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(alpha_[i] > 0.0)) throw InputError("alpha must be positive");
  }
  check_params(params_, inputs_.cols());

  Eigen::MatrixXd cov = kernel_matrix(inputs_, inputs_, params_);
  cov.diagonal() += alpha_;
  cov.diagonal().array() += params_.noise_variance;
  const double mean_diag = cov.diagonal().mean();

  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd trial = cov;
    trial.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = jitter;
      break;
    }
    jitter = jitter == 0.0 ? 1e-10 * mean_diag : jitter * 10.0;
    if (jitter > 1e-4 * mean_diag * (1.0 + 1e-9)) throw FitError("covariance not positive definite after jitter");
  }
  beta_ = factor_.triangularView<Eigen::Lower>().solve(targets_);
  factor_.triangularView<Eigen::Lower>().transpose().solveInPlace(beta_);
}

double GPModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(targets_.size());
  return -0.5 * targets_.dot(beta_) - factor_.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

LikelihoodGradient GPModel::log_marginal_likelihood_gradient() const {
  const Eigen::Index n = targets_.size();
  const Eigen::Index d = inputs_.cols();
  const Eigen::Index n_ls = params_.per_dimension() ? d : 1;

  // Lower triangle of W = beta beta^T - K^-1, blocked so the zeros of L^-1 are skipped.
  constexpr Eigen::Index kBlock = 128;
  Eigen::MatrixXd linv = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; j += kBlock) {
    const Eigen::Index b = std::min(kBlock, n - j);
    const Eigen::Index m = n - j;
    auto cols = linv.block(j, j, m, b);
    cols.setIdentity();
    factor_.bottomRightCorner(m, m).triangularView<Eigen::Lower>().solveInPlace(cols);
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += kBlock) {
    const Eigen::Index e = k + std::min(kBlock, n - k);
    w.topLeftCorner(e, e).selfadjointView<Eigen::Lower>().rankUpdate(linv.block(k, 0, e - k, e).transpose(), -1.0);
  }
  w.selfadjointView<Eigen::Lower>().rankUpdate(beta_, 1.0);

  LikelihoodGradient out;
  out.value = log_marginal_likelihood();
  out.gradient = Eigen::VectorXd::Zero(2 + n_ls);
  Eigen::VectorXd inv_l2(d);
  for (Eigen::Index k = 0; k < d; ++k) inv_l2[k] = 1.0 / std::pow(lengthscale_for(params_, k), 2);

  double g_signal = 0.0, g_noise = 0.0;
  Eigen::VectorXd g_ls = Eigen::VectorXd::Zero(n_ls);
  Eigen::VectorXd diff(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    g_signal += 0.5 * w(j, j) * params_.signal_variance;
    g_noise += 0.5 * w(j, j) * params_.noise_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double r2 = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double t = inputs_(i, k) - inputs_(j, k);
        diff[k] = t * t * inv_l2[k];
        r2 += diff[k];
      }
      const double kf = params_.signal_variance * std::exp(-0.5 * r2);
      const double wk = w(i, j) * kf;  // off-diagonal pairs count twice, times 1/2
      g_signal += wk;
      if (n_ls == 1) {
        g_ls[0] += wk * r2;
      } else {
        g_ls += wk * diff;
      }
    }
  }
  out.gradient[0] = g_signal;
  out.gradient.segment(1, n_ls) = g_ls;
  out.gradient[1 + n_ls] = g_noise;
  return out;
}

PredictiveDistribution GPModel::predict(std::span<const double> x, bool include_noise) const {
  if (static_cast<Eigen::Index>(x.size()) != inputs_.cols()) throw InputError("predict dimension mismatch");
  Eigen::MatrixXd point(1, inputs_.cols());
  for (Eigen::Index k = 0; k < inputs_.cols(); ++k) point(0, k) = x[static_cast<std::size_t>(k)];
  return predict(point, include_noise).front();
}

std::vector<PredictiveDistribution> GPModel::predict(const Eigen::MatrixXd& points, bool include_noise) const {
  if (points.cols() != inputs_.cols()) throw InputError("predict dimension mismatch");
  const Eigen::MatrixXd kstar = kernel_matrix(inputs_, points, params_);  // n x m
  const Eigen::VectorXd mean = kstar.transpose() * beta_;
  const Eigen::MatrixXd v = factor_.triangularView<Eigen::Lower>().solve(kstar);
  std::vector<PredictiveDistribution> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    double var = std::max(0.0, params_.signal_variance - v.col(j).squaredNorm());
    if (include_noise) var += params_.noise_variance;
    out[static_cast<std::size_t>(j)] = {mean[j], std::sqrt(var), include_noise};
  }
  return out;
}

namespace {

struct Problem {
  const Eigen::MatrixXd& inputs;
  const Eigen::VectorXd& targets;
  const Eigen::VectorXd& alpha;
  Eigen::Index n_ls;
  Eigen::VectorXd lower, upper;  // log-space box
  KernelBounds bounds;

  KernelParams unpack(const Eigen::VectorXd& theta) const {
    auto value = [](double t, const ParamBounds& b) { return std::clamp(std::exp(t), b.low, b.high); };
    KernelParams p;
    p.signal_variance = value(theta[0], bounds.signal_variance);
    p.lengthscales.resize(static_cast<std::size_t>(n_ls));
    for (Eigen::Index k = 0; k < n_ls; ++k) {
      p.lengthscales[static_cast<std::size_t>(k)] = value(theta[1 + k], bounds.lengthscale);
    }
    p.noise_variance = value(theta[1 + n_ls], bounds.noise_variance);
    return p;
  }

  Eigen::VectorXd project(Eigen::VectorXd theta) const { return theta.cwiseMax(lower).cwiseMin(upper); }
};

struct Point {
  Eigen::VectorXd theta;
  double value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd gradient;
};

std::optional<GPModel> build(const Problem& pr, const Eigen::VectorXd& theta) {
  try {
    return GPModel(pr.inputs, pr.targets, pr.alpha, pr.unpack(theta));
  } catch (const FitError&) {
    return std::nullopt;
  }
}

bool evaluate(const GPModel& m, Point& pt) {
  auto lg = m.log_marginal_likelihood_gradient();
  pt.value = lg.value;
  pt.gradient = lg.gradient;
  return std::isfinite(pt.value) && pt.gradient.allFinite();
}

// Zeroes gradient components that point out of the box at active bounds.
Eigen::VectorXd free_gradient(const Problem& pr, const Point& pt) {
  Eigen::VectorXd g = pt.gradient;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if ((pt.theta[i] <= pr.lower[i] && g[i] < 0.0) || (pt.theta[i] >= pr.upper[i] && g[i] > 0.0)) g[i] = 0.0;
  }
  return g;
}

// Projected L-BFGS ascent from `start`.
Point ascend(const Problem& pr, Eigen::VectorXd start, const FitConfig& cfg) {
  constexpr std::size_t kMemory = 6;
  Point cur;
  cur.theta = pr.project(std::move(start));
  {
    const auto m = build(pr, cur.theta);
    if (!m || !evaluate(*m, cur)) return cur;
  }

  std::vector<Eigen::VectorXd> ss, ys;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const Eigen::VectorXd g = free_gradient(pr, cur);
    if (g.lpNorm<Eigen::Infinity>() < 1e-8) break;

    // Two-loop recursion on the negated objective.
    Eigen::VectorXd q = -g;
    std::vector<double> a(ss.size());
    for (std::size_t k = ss.size(); k-- > 0;) {
      a[k] = ss[k].dot(q) / ys[k].dot(ss[k]);
      q -= a[k] * ys[k];
    }
    if (!ss.empty()) q *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
    for (std::size_t k = 0; k < ss.size(); ++k) {
      const double b = ys[k].dot(q) / ys[k].dot(ss[k]);
      q += (a[k] - b) * ss[k];
    }
    Eigen::VectorXd dir = -q;
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
      if (g[i] == 0.0 && cur.gradient[i] != 0.0) dir[i] = 0.0;  // pinned at a bound
    }
    if (!(dir.dot(g) > 0.0)) {
      ss.clear();
      ys.clear();
      dir = g;
    }
    // Cap the first step so it moves at most one unit in log space.
    double step = 1.0;
    const double dmax = dir.lpNorm<Eigen::Infinity>();
    if (ss.empty() && dmax > 1.0) step = 1.0 / dmax;

    Point next;
    std::optional<GPModel> model;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      next.theta = pr.project(cur.theta + step * dir);
      const Eigen::VectorXd delta = next.theta - cur.theta;
      if (delta.lpNorm<Eigen::Infinity>() < 1e-12) break;
      model = build(pr, next.theta);
      if (model && std::isfinite(model->log_marginal_likelihood()) &&
          model->log_marginal_likelihood() >= cur.value + 1e-4 * g.dot(delta)) {
        break;
      }
      model.reset();
    }
    if (!model) {
      if (ss.empty()) break;
      ss.clear();
      ys.clear();
      continue;
    }
    if (!evaluate(*model, next)) break;
    const Eigen::VectorXd s = next.theta - cur.theta;
    const Eigen::VectorXd y = cur.gradient - next.gradient;  // gradient of the negated objective
    if (s.dot(y) > 1e-12) {
      ss.push_back(s);
      ys.push_back(y);
      if (ss.size() > kMemory) {
        ss.erase(ss.begin());
        ys.erase(ys.begin());
      }
    }
    const double change = next.value - cur.value;
    cur = std::move(next);
    if (std::abs(change) <= cfg.tolerance * (1.0 + std::abs(cur.value))) break;
  }
  return cur;
}

}  // namespace

GPModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const Eigen::VectorXd& alpha,
            const FitConfig& config, std::uint64_t seed) {
  if (inputs.rows() < 2) throw InputError("fit needs at least two samples");
  if (config.restarts < 1) throw InputError("restarts must be at least 1");
  config.bounds.validate();
  const Eigen::Index n_ls = config.per_dimension_lengthscales ? inputs.cols() : 1;
  const auto& b = config.bounds;

  Problem pr{inputs, targets, alpha, n_ls, Eigen::VectorXd(2 + n_ls), Eigen::VectorXd(2 + n_ls), b};
  pr.lower[0] = std::log(b.signal_variance.low);
  pr.upper[0] = std::log(b.signal_variance.high);
  pr.lower.segment(1, n_ls).setConstant(std::log(b.lengthscale.low));
  pr.upper.segment(1, n_ls).setConstant(std::log(b.lengthscale.high));
  pr.lower[1 + n_ls] = std::log(b.noise_variance.low);
  pr.upper[1 + n_ls] = std::log(b.noise_variance.high);

  const double mean = targets.mean();
  const double second_moment = targets.squaredNorm() / static_cast<double>(targets.size());
  const double variance = std::max(second_moment - mean * mean, 1e-12);
  Eigen::VectorXd first(2 + n_ls);
  first[0] = std::log(std::max(second_moment, 1e-12));
  first.segment(1, n_ls).setConstant(std::log(0.3));
  first[1 + n_ls] = std::log(0.1 * variance);

  std::mt19937_64 rng(seed);
  Point best;
  int best_index = -1;
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::VectorXd start = first;
    if (r > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) {
        start[i] = std::uniform_real_distribution<double>(pr.lower[i], pr.upper[i])(rng);
      }
    }
    Point p = ascend(pr, start, config);
    if (std::isfinite(p.value) && p.value > best.value) {
      best = std::move(p);
      best_index = r;
    }
  }
  if (best_index < 0) throw FitError("every restart failed to factorize the covariance");
  spdlog::debug("gp fit: best restart {} lml {}", best_index, best.value);
  return GPModel(inputs, targets, alpha, pr.unpack(best.theta));
}

nlohmann::json to_json(const KernelParams& p) {
  return {{"signal_variance", p.signal_variance},
          {"lengthscales", p.lengthscales},
          {"noise_variance", p.noise_variance}};
}

KernelParams kernel_params_from_json(const nlohmann::json& j) {
  KernelParams p;
  p.signal_variance = j.at("signal_variance").get<double>();
  p.lengthscales = j.at("lengthscales").get<std::vector<double>>();
  p.noise_variance = j.at("noise_variance").get<double>();
  return p;
}

nlohmann::json to_json(const KernelBounds& b) {
  auto pair = [](const ParamBounds& p) { return nlohmann::json::array({p.low, p.high}); };
  return {{"signal_variance", pair(b.signal_variance)},
          {"lengthscale", pair(b.lengthscale)},
          {"noise_variance", pair(b.noise_variance)}};
}

KernelBounds kernel_bounds_from_json(const nlohmann::json& j) {
  auto pair = [](const nlohmann::json& a) { return ParamBounds{a.at(0).get<double>(), a.at(1).get<double>()}; };
  KernelBounds b;
  b.signal_variance = pair(j.at("signal_variance"));
  b.lengthscale = pair(j.at("lengthscale"));
  b.noise_variance = pair(j.at("noise_variance"));
  b.validate();
  return b;
}

}  // namespace uberr
