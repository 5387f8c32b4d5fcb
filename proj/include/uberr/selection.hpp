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

#ifndef UBERR_SELECTION_HPP_
#define UBERR_SELECTION_HPP_

#include <span>
#include <string>
#include <vector>

#include "uberr/features.hpp"
#include "uberr/transforms.hpp"

namespace uberr {

struct VEDataset;

/// Sample distance correlation in [0, 1]; 0 when either distance variance
/// is 0. Throws InputError on length mismatch or n < 4.
double dcor(std::span<const double> x, std::span<const double> y);

struct NamedColumn {
  std::string name;
  FeatureGroup group;
  std::vector<double> values;
};

struct RankedFeature {
  std::string name;
  FeatureGroup group;
  double dcor = 0.0;
};

struct Exclusion {
  std::string feature;
  std::string conflicting;  // already-selected feature
  double dcor = 0.0;
};

struct SelectionReport {
  std::vector<RankedFeature> ranking;   // grouped, descending dcor within a group
  std::vector<RankedFeature> selected;  // in selection order
  std::vector<Exclusion> exclusions;
  std::vector<std::string> ordering;    // full incremental ordering of `selected`
};

struct SelectionConfig {
  int per_group = 3;
  double exclusion_threshold = 0.8;
  // When false, the pairwise check only looks at features of the same group.
  bool cross_group_exclusion = true;
  // Rows used for dcor (evenly strided); 0 means all rows.
  std::size_t max_rows = 2000;
};

SelectionReport select_features(std::span<const NamedColumn> features, std::span<const double> target,
                                const SelectionConfig& config = {});

/// Transforms every schema feature and the target with `spec`, then selects.
SelectionReport select_features(const VEDataset& dataset, const TransformSpec& spec,
                                const SelectionConfig& config = {});

/// First k features of the incremental ordering: the least represented group
/// contributes its best remaining feature; ties go to the group whose best
/// remaining feature has the higher dcor.
std::vector<std::string> order_features(const SelectionReport& report, std::size_t k);

/// order_features(report, k) with `required` swapped in when it is missing:
/// it replaces the listed feature that excluded it, otherwise the last one.
/// Throws InputError when `required` was never ranked.
std::vector<std::string> order_features_with(const SelectionReport& report, std::size_t k, const std::string& required);

// Post-hoc check of the per-group cap and the pairwise threshold.
bool selection_respects_constraints(const SelectionReport& report, std::span<const NamedColumn> features,
                                    const SelectionConfig& config = {});

}  // namespace uberr

#endif  // UBERR_SELECTION_HPP_
