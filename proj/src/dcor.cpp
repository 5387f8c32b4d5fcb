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

#include <cmath>
#include <vector>

#include "uberr/errors.hpp"
#include "uberr/selection.hpp"

namespace uberr {
namespace {

// Row means and grand mean of |v_i - v_j|.
void distance_means(std::span<const double> v, std::vector<double>& row, double& grand) {
  const std::size_t n = v.size();
  row.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(v[i] - v[j]);
      row[i] += d;
      row[j] += d;
    }
  }
  grand = 0.0;
  for (double& r : row) {
    r /= static_cast<double>(n);
    grand += r;
  }
  grand /= static_cast<double>(n);
}

}  // namespace

double dcor(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("dcor needs sequences of equal length");
  if (x.size() < 4) throw InputError("dcor needs at least 4 values");
  const std::size_t n = x.size();
  std::vector<double> ax, by;
  double a, b;
  distance_means(x, ax, a);
  distance_means(y, by, b);

  // mean(A*B) = mean(a*b) - 2 mean_i(a_i. b_i.) + a.. b..
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = std::abs(x[i] - x[j]);
      const double db = std::abs(y[i] - y[j]);
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  double rab = 0.0, raa = 0.0, rbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rab += ax[i] * by[i];
    raa += ax[i] * ax[i];
    rbb += by[i] * by[i];
  }
  const double dn = static_cast<double>(n);
  const double cov = 2.0 * sab / nn - 2.0 * rab / dn + a * b;
  const double vx = 2.0 * saa / nn - 2.0 * raa / dn + a * a;
  const double vy = 2.0 * sbb / nn - 2.0 * rbb / dn + b * b;
  if (!(vx > 0.0) || !(vy > 0.0)) return 0.0;
  const double r2 = std::max(0.0, cov) / std::sqrt(vx * vy);
  return std::min(1.0, std::sqrt(r2));
}

}  // namespace uberr
