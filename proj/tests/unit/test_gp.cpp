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

#include <Eigen/Cholesky>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "uberr/errors.hpp"
#include "uberr/gp.hpp"

namespace uberr {
namespace {

struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd alpha;
  KernelParams params;
};

Problem random_problem(std::mt19937_64& rng, int n, int d, bool per_dim = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng)); };
  Problem p;
  p.x.resize(n, d);
  p.y.resize(n);
  p.alpha.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) p.x(i, k) = u(rng);
    p.y[i] = std::sin(4.0 * p.x(i, 0)) + 0.3 * u(rng);
    p.alpha[i] = log_uniform(1e-4, 1e-1);
  }
  p.params.signal_variance = log_uniform(0.1, 5.0);
  p.params.lengthscales.assign(per_dim ? static_cast<std::size_t>(d) : 1u, 0.0);
  for (double& l : p.params.lengthscales) l = log_uniform(0.1, 2.0);
  p.params.noise_variance = log_uniform(1e-6, 1e-2);
  return p;
}

oracle::GpProblem to_oracle(const Problem& p) {
  oracle::GpProblem o;
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    o.x.emplace_back();
    for (Eigen::Index k = 0; k < p.x.cols(); ++k) o.x.back().push_back(p.x(i, k));
    o.y.push_back(p.y[i]);
    o.alpha.push_back(p.alpha[i]);
  }
  o.signal = p.params.signal_variance;
  o.lengthscales = p.params.lengthscales;
  o.noise = p.params.noise_variance;
  return o;
}

TEST(Kernel, HandValuesAndLimits) {
  KernelParams p{2.0, {1.0}, 0.5};
  const double a[] = {0.0, 0.0}, b[] = {1.0, 0.0}, far[] = {1e4, 0.0};
  EXPECT_NEAR(kernel_eval(a, b, p), 2.0 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(kernel_eval(a, b, p), 1.2131, 1e-4);
  EXPECT_EQ(kernel_eval(a, a, p), 2.0);
  EXPECT_EQ(kernel_eval(a, far, p), 0.0);
  const double c[] = {1.0};
  EXPECT_THROW(kernel_eval(a, c, p), InputError);
  KernelParams ard{1.0, {1.0, 4.0}, 0.0};
  const double e[] = {0.0, 4.0};
  EXPECT_NEAR(kernel_eval(a, e, ard), std::exp(-0.5), 1e-15);
}

TEST(Alpha, FormulaFixedPointAndMonotone) {
  const std::vector<double> eq(5, 1.0);
  for (double a : alpha_from_weights(eq, 0.01)) EXPECT_DOUBLE_EQ(a, 0.01);
  const std::vector<double> w = {1.0556, 0.8889, 1.0556};
  const auto a = alpha_from_weights(w, 0.01);
  const double mean = (1.0556 + 0.8889 + 1.0556) / 3.0;
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], 0.01 * std::log(1.0 + mean) / std::log(1.0 + w[i]), 1e-15);
  EXPECT_LT(a[0], a[1]);
  EXPECT_DOUBLE_EQ(a[0], a[2]);
  EXPECT_THROW(alpha_from_weights(std::vector<double>{1.0, 0.0}, 0.01), InputError);
}

TEST(Predict, MatchesNaiveReference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t, d = 1 + t % 5;
    const auto p = random_problem(rng, n, d, t % 3 == 0);
    const GPModel m(p.x, p.y, p.alpha, p.params);
    const auto o = to_oracle(p);
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (double& v : x) v = u(rng);
      const auto [mean, var] = oracle::gp_predict(o, x);
      const auto pd = m.predict(x, false);
      EXPECT_NEAR(pd.mean, mean, 1e-8);
      EXPECT_NEAR(pd.std * pd.std, std::max(0.0, var), 1e-8);
      const auto pn = m.predict(x, true);
      EXPECT_NEAR(pn.std * pn.std, std::max(0.0, var) + p.params.noise_variance, 1e-8);
    }
    EXPECT_NEAR(m.log_marginal_likelihood(), oracle::gp_log_marginal_likelihood(o), 1e-8 * std::max(1.0, std::abs(m.log_marginal_likelihood())));
  }
}

TEST(Likelihood, ScalarClosedForm) {
  Eigen::MatrixXd x(1, 2);
  x << 0.3, 0.7;
  Eigen::VectorXd y(1), a(1);
  y << 0.8;
  a << 0.05;
  const KernelParams p{1.7, {0.4}, 0.01};
  const GPModel m(x, y, a, p);
  const double v = 1.7 + 0.05 + 0.01;
  EXPECT_NEAR(m.log_marginal_likelihood(), -0.5 * (0.8 * 0.8 / v + std::log(v) + std::log(2.0 * M_PI)), 1e-12);
  const double q[] = {0.5, 0.2};
  const double x1[] = {0.3, 0.7};
  const double kx = kernel_eval(q, x1, p);
  EXPECT_NEAR(m.predict(q, false).mean, kx * 0.8 / v, 1e-12);
  EXPECT_NEAR(m.predict(q, false).std, std::sqrt(1.7 - kx * kx / v), 1e-12);
}

TEST(Likelihood, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const bool ard = t % 4 == 0;
    auto p = random_problem(rng, 20, 1 + t % 4, ard);
    const GPModel m(p.x, p.y, p.alpha, p.params);
    const auto g = m.log_marginal_likelihood_gradient();
    EXPECT_NEAR(g.value, m.log_marginal_likelihood(), 1e-10 * std::abs(g.value));
    std::vector<double*> slots = {&p.params.signal_variance};
    for (double& l : p.params.lengthscales) slots.push_back(&l);
    slots.push_back(&p.params.noise_variance);
    ASSERT_EQ(static_cast<std::size_t>(g.gradient.size()), slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const double orig = *slots[k];
      const double h = 1e-5;
      *slots[k] = orig * std::exp(h);
      const double up = GPModel(p.x, p.y, p.alpha, p.params).log_marginal_likelihood();
      *slots[k] = orig * std::exp(-h);
      const double down = GPModel(p.x, p.y, p.alpha, p.params).log_marginal_likelihood();
      *slots[k] = orig;
      const double fd = (up - down) / (2.0 * h);
      EXPECT_NEAR(g.gradient[static_cast<Eigen::Index>(k)], fd, 1e-5 * std::max(1.0, std::abs(fd))) << "problem " << t << " param " << k;
    }
  }
}

TEST(Likelihood, PermutationInvariant) {
  std::mt19937_64 rng(3);
  const auto p = random_problem(rng, 15, 3);
  std::vector<int> perm(15);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd x(15, 3);
  Eigen::VectorXd y(15), a(15);
  for (int i = 0; i < 15; ++i) {
    x.row(i) = p.x.row(perm[static_cast<std::size_t>(i)]);
    y[i] = p.y[perm[static_cast<std::size_t>(i)]];
    a[i] = p.alpha[perm[static_cast<std::size_t>(i)]];
  }
  EXPECT_NEAR(GPModel(p.x, p.y, p.alpha, p.params).log_marginal_likelihood(),
              GPModel(x, y, a, p.params).log_marginal_likelihood(), 1e-10);
}

TEST(Predict, InterpolationAndPriorReversion) {
  Eigen::MatrixXd x(3, 1);
  x << 0.1, 0.5, 0.9;
  Eigen::VectorXd y(3), a = Eigen::VectorXd::Constant(3, 1e-12);
  y << 0.3, -0.2, 0.6;
  const KernelParams p{1.0, {0.2}, 1e-12};
  const GPModel m(x, y, a, p);
  for (int i = 0; i < 3; ++i) {
    const double q[] = {x(i, 0)};
    EXPECT_NEAR(m.predict(q, false).mean, y[i], 1e-6);
    EXPECT_NEAR(m.predict(q, false).std, 0.0, 1e-4);
  }
  const double far[] = {50.0};
  EXPECT_NEAR(m.predict(far, false).mean, 0.0, 1e-12);
  EXPECT_NEAR(m.predict(far, false).std, 1.0, 1e-12);
  const double wrong[] = {0.1, 0.2};
  EXPECT_THROW(m.predict(wrong, false), InputError);
}

TEST(Predict, VarianceGrowsAwayFromData) {
  std::mt19937_64 rng(5);
  auto p = random_problem(rng, 25, 1);
  p.params.lengthscales = {0.15};
  const GPModel m(p.x, p.y, p.alpha, p.params);
  const double hi = p.x.col(0).maxCoeff(), lo = p.x.col(0).minCoeff();
  for (int dir : {-1, 1}) {
    double prev = -1.0;
    for (int s = 0; s < 50; ++s) {
      const double edge = dir > 0 ? hi : lo;
      const double q[] = {edge + dir * (3.0 * 0.15 + 0.02 * s)};
      const double v = m.predict(q, true).std;
      EXPECT_GE(v, prev - 1e-12);
      EXPECT_GE(v, 0.0);
      prev = v;
    }
  }
}

TEST(Predict, AddingAPointNeverIncreasesVariance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_problem(rng, 8, 2);
    Eigen::MatrixXd x2(9, 2);
    x2.topRows(8) = p.x;
    x2.row(8) << u(rng), u(rng);
    Eigen::VectorXd y2(9), a2(9);
    y2 << p.y, 0.1;
    a2 << p.alpha, 0.01;
    const GPModel small(p.x, p.y, p.alpha, p.params), big(x2, y2, a2, p.params);
    for (int q = 0; q < 20; ++q) {
      const double x[] = {u(rng) * 1.4 - 0.2, u(rng) * 1.4 - 0.2};
      EXPECT_LE(big.predict(x, false).std, small.predict(x, false).std + 1e-10);
    }
  }
}

TEST(Predict, HigherWeightPullsMeanTowardTarget) {
  Eigen::MatrixXd x(2, 1);
  x << 0.4, 0.45;
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  const KernelParams p{1.0, {0.3}, 1e-4};
  auto gap = [&](double w0) {
    const std::vector<double> w = {w0, 2.0 - w0};
    const auto av = alpha_from_weights(w, 0.05);
    const GPModel m(x, y, Eigen::Map<const Eigen::VectorXd>(av.data(), 2), p);
    const double q[] = {0.4};
    return std::abs(m.predict(q, false).mean - 1.0);
  };
  EXPECT_LT(gap(1.6), gap(1.0));
  EXPECT_LT(gap(1.0), gap(0.4));
}

TEST(Construct, RejectsBadInputs) {
  Eigen::MatrixXd x(2, 1);
  x << 0.1, 0.2;
  Eigen::VectorXd y(2), a(2), short_a(1);
  y << 1.0, 2.0;
  a << 0.01, 0.0;
  short_a << 0.1;
  EXPECT_THROW(GPModel(x, y, a, KernelParams{}), InputError);
  EXPECT_THROW(GPModel(x, y, short_a, KernelParams{}), InputError);
  EXPECT_THROW(GPModel(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), Eigen::VectorXd(0), KernelParams{}), InputError);
}

TEST(Construct, DuplicatedInputsFactorize) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(40, 2, 0.5);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(40, 0.2), a = Eigen::VectorXd::Constant(40, 1e-14);
  const KernelParams p{1.0, {1.0}, 0.0};
  const GPModel m(x, y, a, p);
  EXPECT_GE(m.jitter(), 0.0);
  const double q[] = {0.5, 0.5};
  EXPECT_NEAR(m.predict(q, false).mean, 0.2, 1e-4);
}

TEST(Fit, DeterministicAndInterpolatesSmoothFunction) {
  const int n = 25;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n), a = Eigen::VectorXd::Constant(n, 1e-10);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i) / (n - 1);
    y[i] = std::sin(3.0 * x(i, 0));
  }
  FitConfig cfg;
  cfg.restarts = 3;
  cfg.bounds.noise_variance.low = 1e-12;
  const auto m1 = fit(x, y, a, cfg, 42);
  const auto m2 = fit(x, y, a, cfg, 42);
  EXPECT_EQ(m1.params().signal_variance, m2.params().signal_variance);
  EXPECT_EQ(m1.params().lengthscales, m2.params().lengthscales);
  EXPECT_EQ(m1.params().noise_variance, m2.params().noise_variance);
  for (int i = 0; i < n; ++i) {
    const double q[] = {x(i, 0)};
    EXPECT_NEAR(m1.predict(q, false).mean, y[i], 1e-6);
  }
  const auto& b = cfg.bounds;
  EXPECT_GE(m1.params().signal_variance, b.signal_variance.low);
  EXPECT_LE(m1.params().signal_variance, b.signal_variance.high);
  EXPECT_GE(m1.params().noise_variance, b.noise_variance.low);
  EXPECT_LE(m1.params().noise_variance, b.noise_variance.high);
}

TEST(Fit, RecoversLengthscaleOfKnownGp) {
  const int n = 200;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) x.row(i) << u(rng), u(rng);
  const KernelParams truth{1.0, {0.25}, 1e-3};
  Eigen::MatrixXd k = kernel_matrix(x, x, truth);
  k.diagonal().array() += truth.noise_variance + 1e-3;
  const Eigen::MatrixXd l = k.llt().matrixL();
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = n01(rng);
  const Eigen::VectorXd y = l * z;
  FitConfig cfg;
  cfg.restarts = 3;
  const auto m = fit(x, y, Eigen::VectorXd::Constant(n, 1e-3), cfg, 1);
  const double ls = m.params().lengthscales.front();
  EXPECT_GT(ls, 0.125);
  EXPECT_LT(ls, 0.5);
}

TEST(Fit, Errors) {
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  Eigen::VectorXd y(1), a(1);
  y << 0.0;
  a << 0.1;
  EXPECT_THROW(fit(x, y, a, FitConfig{}, 0), InputError);
  FitConfig bad;
  bad.restarts = 0;
  Eigen::MatrixXd x2(2, 1);
  x2 << 0.0, 1.0;
  Eigen::VectorXd y2(2), a2 = Eigen::VectorXd::Constant(2, 0.1);
  y2 << 0.0, 1.0;
  EXPECT_THROW(fit(x2, y2, a2, bad, 0), InputError);
}

TEST(Json, KernelRoundTrip) {
  const KernelParams p{0.7, {0.2, 0.9}, 3e-5};
  const auto q = kernel_params_from_json(to_json(p));
  EXPECT_EQ(q.signal_variance, p.signal_variance);
  EXPECT_EQ(q.lengthscales, p.lengthscales);
  EXPECT_EQ(q.noise_variance, p.noise_variance);
  KernelBounds b;
  b.lengthscale = {0.05, 20.0};
  const auto c = kernel_bounds_from_json(to_json(b));
  EXPECT_EQ(c.lengthscale.low, 0.05);
  EXPECT_EQ(c.lengthscale.high, 20.0);
}

}  // namespace
}  // namespace uberr
