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

#ifndef UBERR_GRID_HPP_
#define UBERR_GRID_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "uberr/evaluation.hpp"

namespace uberr {

enum class PinMode { weighted_median, mean, custom };

struct GridAxis {
  std::string feature;
  std::vector<double> lattice;  // transformed-scaled, strictly increasing
  std::vector<double> labels;   // back-transformed raw values
};

struct GridCell {
  double mean = 0.0;
  double std = 0.0;
  bool in_domain = false;
  std::size_t density = 0;
  double mean_backtransformed = 0.0;
};

struct GridSurface {
  std::string view;  // "curve", "mean", "std" or "density"
  std::vector<GridAxis> axes;
  std::map<std::string, double> fixed_values;  // transformed-scaled pins
  std::vector<GridCell> cells;                 // first axis outermost
  double band_sigma = 2.0;

  std::size_t index(std::size_t i, std::size_t j = 0) const;
  const GridCell& at(std::size_t i, std::size_t j = 0) const { return cells[index(i, j)]; }
};

struct GridConfig {
  std::size_t resolution = 50;
  double extend_fraction = 0.25;
  PinMode pin = PinMode::weighted_median;
  std::map<std::string, double> custom_pins;  // raw feature values
  double band_sigma = 2.0;
  std::string curve_feature = "power_variation";
};

std::vector<double> make_lattice(double low, double high, std::size_t resolution, double extend_fraction);

/// Nearest-cell 1-D or 2-D histogram of `points` (rows = samples, one column
/// per lattice). Cells are ordered with the first axis outermost.
std::vector<std::size_t> density_map(const Eigen::MatrixXd& points, std::span<const std::vector<double>> lattices);

/// 1-D: cell inside [min, max]. 2-D: cell center inside the convex hull of
/// the points, or their bounding box when the hull is degenerate.
std::vector<bool> domain_mask(const Eigen::MatrixXd& points, std::span<const std::vector<double>> lattices);

/// Convex hull (counter-clockwise, no collinear vertices).
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> points);

/// Noise-free predictions over a lattice spanning the training range of each
/// axis extended by extend_fraction; other features pinned.
GridSurface grid_predict(const TrainedModel& trained, const VEDataset& dataset, std::span<const std::string> axes,
                         const GridConfig& config = {});

struct StructureBundle {
  GridSurface curve;
  std::vector<GridSurface> mean_maps;
  std::vector<GridSurface> std_maps;
  std::vector<GridSurface> density_maps;
};

/// Curve along config.curve_feature (or the first model feature) plus mean,
/// std and density surfaces for each requested pair (all pairs when empty).
StructureBundle structure_report(const TrainedModel& trained, const VEDataset& dataset, const GridConfig& config,
                                 std::span<const std::pair<std::string, std::string>> pairs = {});

/// Mean std over the lowest- and highest-density deciles of in-domain cells.
std::pair<double, double> density_decile_sigma(const GridSurface& surface);

std::string to_csv(const GridSurface& surface);
nlohmann::json to_json(const GridSurface& surface);

}  // namespace uberr

#endif  // UBERR_GRID_HPP_
