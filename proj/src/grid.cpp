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

#include "uberr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "uberr/errors.hpp"

namespace uberr {
namespace {

std::size_t nearest(const std::vector<double>& lattice, double v) {
  auto it = std::lower_bound(lattice.begin(), lattice.end(), v);
  if (it == lattice.begin()) return 0;
  if (it == lattice.end()) return lattice.size() - 1;
  const auto hi = static_cast<std::size_t>(it - lattice.begin());
  return (v - lattice[hi - 1] <= lattice[hi] - v) ? hi - 1 : hi;
}

double cross(const std::pair<double, double>& o, const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

double weighted_median(std::vector<std::pair<double, double>> vw) {
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& p : vw) total += p.second;
  double acc = 0.0;
  for (const auto& p : vw) {
    acc += p.second;
    if (acc >= 0.5 * total) return p.first;
  }
  return vw.back().first;
}

std::size_t feature_column(const TrainedModel& t, const std::string& name) {
  auto it = std::find(t.features.begin(), t.features.end(), name);
  if (it == t.features.end()) throw InputError("'" + name + "' is not a model feature");
  return static_cast<std::size_t>(it - t.features.begin());
}

}  // namespace

std::size_t GridSurface::index(std::size_t i, std::size_t j) const {
  return axes.size() == 2 ? i * axes[1].lattice.size() + j : i;
}

std::vector<double> make_lattice(double low, double high, std::size_t resolution, double extend_fraction) {
  if (resolution < 2) throw InputError("grid resolution must be at least 2");
  if (extend_fraction < 0.0) throw InputError("extend_fraction must be nonnegative");
  double range = high - low;
  if (!(range > 0.0)) {
    low -= 0.5;
    range = 1.0;
  }
  const double a = low - extend_fraction * range;
  const double b = low + range + extend_fraction * range;
  std::vector<double> out(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(resolution - 1);
  }
  out.back() = b;
  return out;
}

std::vector<std::size_t> density_map(const Eigen::MatrixXd& points, std::span<const std::vector<double>> lattices) {
  if (lattices.empty() || lattices.size() > 2 || static_cast<std::size_t>(points.cols()) != lattices.size()) {
    throw InputError("density_map needs one or two axes matching the point dimension");
  }
  const std::size_t n2 = lattices.size() == 2 ? lattices[1].size() : 1;
  std::vector<std::size_t> counts(lattices[0].size() * n2, 0);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const std::size_t i = nearest(lattices[0], points(r, 0));
    const std::size_t j = lattices.size() == 2 ? nearest(lattices[1], points(r, 1)) : 0;
    ++counts[i * n2 + j];
  }
  return counts;
}

std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<bool> domain_mask(const Eigen::MatrixXd& points, std::span<const std::vector<double>> lattices) {
  if (lattices.empty() || lattices.size() > 2 || static_cast<std::size_t>(points.cols()) != lattices.size()) {
    throw InputError("domain_mask needs one or two axes matching the point dimension");
  }
  if (points.rows() == 0) throw InputError("domain_mask needs at least one point");
  const Eigen::VectorXd lo = points.colwise().minCoeff();
  const Eigen::VectorXd hi = points.colwise().maxCoeff();
  if (lattices.size() == 1) {
    std::vector<bool> out;
    for (double v : lattices[0]) out.push_back(v >= lo[0] && v <= hi[0]);
    return out;
  }
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index r = 0; r < points.rows(); ++r) pts.emplace_back(points(r, 0), points(r, 1));
  const auto hull = convex_hull(std::move(pts));
  const bool degenerate = hull.size() < 3;
  if (degenerate) spdlog::info("domain hull is degenerate; using the bounding box");

  std::vector<bool> out;
  out.reserve(lattices[0].size() * lattices[1].size());
  for (double x : lattices[0]) {
    for (double y : lattices[1]) {
      if (degenerate) {
        out.push_back(x >= lo[0] && x <= hi[0] && y >= lo[1] && y <= hi[1]);
        continue;
      }
      bool inside = true;
      for (std::size_t k = 0; k < hull.size() && inside; ++k) {
        inside = cross(hull[k], hull[(k + 1) % hull.size()], {x, y}) >= 0.0;
      }
      out.push_back(inside);
    }
  }
  return out;
}

GridSurface grid_predict(const TrainedModel& trained, const VEDataset& dataset, std::span<const std::string> axes,
                         const GridConfig& config) {
  if (axes.empty() || axes.size() > 2) throw InputError("a grid has one or two axes");
  const auto& x = trained.model.inputs();
  std::vector<std::size_t> cols;
  for (const auto& a : axes) cols.push_back(feature_column(trained, a));
  if (cols.size() == 2 && cols[0] == cols[1]) throw InputError("grid axes must differ");

  GridSurface s;
  s.view = axes.size() == 1 ? "curve" : "mean";
  s.band_sigma = config.band_sigma;
  std::vector<std::vector<double>> lattices;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto c = static_cast<Eigen::Index>(cols[a]);
    GridAxis ax{axes[a], make_lattice(x.col(c).minCoeff(), x.col(c).maxCoeff(), config.resolution,
                                      config.extend_fraction), {}};
    const auto& t = trained.transforms.at(axes[a]);
    for (double v : ax.lattice) ax.labels.push_back(t.inverse(v));
    lattices.push_back(ax.lattice);
    s.axes.push_back(std::move(ax));
  }

  const auto weights = dataset.weights(trained.train_rows);
  Eigen::VectorXd pin(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const auto& name = trained.features[static_cast<std::size_t>(c)];
    if (config.pin == PinMode::mean) {
      pin[c] = x.col(c).mean();
    } else if (config.pin == PinMode::custom && config.custom_pins.count(name)) {
      pin[c] = trained.transforms.forward(name, config.custom_pins.at(name));
    } else {
      std::vector<std::pair<double, double>> vw;
      for (Eigen::Index r = 0; r < x.rows(); ++r) vw.emplace_back(x(r, c), weights[static_cast<std::size_t>(r)]);
      pin[c] = weighted_median(std::move(vw));
    }
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (std::find(cols.begin(), cols.end(), static_cast<std::size_t>(c)) == cols.end()) {
      s.fixed_values[trained.features[static_cast<std::size_t>(c)]] = pin[c];
    }
  }

  const std::size_t n1 = lattices[0].size();
  const std::size_t n2 = lattices.size() == 2 ? lattices[1].size() : 1;
  Eigen::MatrixXd points(static_cast<Eigen::Index>(n1 * n2), x.cols());
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const auto r = static_cast<Eigen::Index>(i * n2 + j);
      points.row(r) = pin.transpose();
      points(r, static_cast<Eigen::Index>(cols[0])) = lattices[0][i];
      if (lattices.size() == 2) points(r, static_cast<Eigen::Index>(cols[1])) = lattices[1][j];
    }
  }
  const auto pred = trained.model.predict(points, false);

  Eigen::MatrixXd projected(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < cols.size(); ++a) {
    projected.col(static_cast<Eigen::Index>(a)) = x.col(static_cast<Eigen::Index>(cols[a]));
  }
  const auto density = density_map(projected, lattices);
  const auto mask = domain_mask(projected, lattices);
  const auto& tt = trained.transforms.at("target_cvrmse");
  s.cells.resize(n1 * n2);
  for (std::size_t k = 0; k < s.cells.size(); ++k) {
    s.cells[k] = {pred[k].mean, pred[k].std, static_cast<bool>(mask[k]), density[k], tt.inverse(pred[k].mean)};
  }
  return s;
}

StructureBundle structure_report(const TrainedModel& trained, const VEDataset& dataset, const GridConfig& config,
                                 std::span<const std::pair<std::string, std::string>> pairs) {
  StructureBundle b;
  const auto& fs = trained.features;
  const std::string curve =
      std::find(fs.begin(), fs.end(), config.curve_feature) != fs.end() ? config.curve_feature : fs.front();
  const std::string curve_axes[] = {curve};
  b.curve = grid_predict(trained, dataset, curve_axes, config);

  std::vector<std::pair<std::string, std::string>> todo(pairs.begin(), pairs.end());
  if (todo.empty()) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i + 1; j < fs.size(); ++j) todo.emplace_back(fs[i], fs[j]);
    }
  }
  for (const auto& [a, c] : todo) {
    const std::string axes[] = {a, c};
    GridSurface s = grid_predict(trained, dataset, axes, config);
    b.mean_maps.push_back(s);
    s.view = "std";
    b.std_maps.push_back(s);
    s.view = "density";
    b.density_maps.push_back(std::move(s));
  }
  return b;
}

std::pair<double, double> density_decile_sigma(const GridSurface& surface) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < surface.cells.size(); ++k) {
    if (surface.cells[k].in_domain) idx.push_back(k);
  }
  if (idx.size() < 10) throw InputError("fewer than 10 in-domain cells");
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return surface.cells[a].density < surface.cells[b].density; });
  const std::size_t d = idx.size() / 10;
  double low = 0.0, high = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    low += surface.cells[idx[k]].std;
    high += surface.cells[idx[idx.size() - 1 - k]].std;
  }
  return {low / static_cast<double>(d), high / static_cast<double>(d)};
}

std::string to_csv(const GridSurface& s) {
  std::ostringstream out;
  out.precision(17);
  out << "axis1,axis2,mean,std,in_domain,density,mean_backtransformed\n";
  const std::size_t n1 = s.axes.empty() ? 0 : s.axes[0].lattice.size();
  const std::size_t n2 = s.axes.size() == 2 ? s.axes[1].lattice.size() : 1;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const auto& c = s.at(i, j);
      out << s.axes[0].lattice[i] << ',';
      if (s.axes.size() == 2) out << s.axes[1].lattice[j];
      out << ',' << c.mean << ',' << c.std << ',' << (c.in_domain ? 1 : 0) << ',' << c.density << ','
          << c.mean_backtransformed << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(const GridSurface& s) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : s.axes) axes.push_back({{"feature", a.feature}, {"lattice", a.lattice}, {"labels", a.labels}});
  return {{"view", s.view}, {"axes", axes}, {"fixed_values", s.fixed_values}, {"band_sigma", s.band_sigma}};
}

}  // namespace uberr
