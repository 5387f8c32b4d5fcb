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

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "uberr/errors.hpp"
#include "uberr/selection.hpp"
#include "uberr/ve_builder.hpp"

namespace uberr {
namespace {

bool ranked_before(const RankedFeature& a, const RankedFeature& b) {
  if (a.dcor != b.dcor) return a.dcor > b.dcor;
  return a.name < b.name;
}

std::vector<std::size_t> strided_rows(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> rows;
  if (cap == 0 || n <= cap) {
    rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
  }
  rows.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) rows.push_back(k * n / cap);
  return rows;
}

std::vector<double> take(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace

SelectionReport select_features(std::span<const NamedColumn> features, std::span<const double> target,
                                const SelectionConfig& config) {
  if (config.per_group < 1) throw InputError("per_group must be at least 1");
  for (const auto& f : features) {
    if (f.values.size() != target.size()) throw InputError("feature '" + f.name + "' length differs from target");
  }
  const auto rows = strided_rows(target.size(), config.max_rows);
  const std::vector<double> y = take(std::vector<double>(target.begin(), target.end()), rows);
  std::vector<std::vector<double>> cols;
  cols.reserve(features.size());
  for (const auto& f : features) cols.push_back(take(f.values, rows));

  SelectionReport report;
  std::vector<RankedFeature> all;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < features.size(); ++i) {
    all.push_back({features[i].name, features[i].group, dcor(cols[i], y)});
    index[features[i].name] = i;
  }
  report.ranking = all;
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [](const auto& a, const auto& b) {
    if (a.group != b.group) return a.group < b.group;
    return ranked_before(a, b);
  });

  std::vector<RankedFeature> order = all;
  std::sort(order.begin(), order.end(), ranked_before);
  std::map<FeatureGroup, int> taken;
  for (const auto& cand : order) {
    if (taken[cand.group] >= config.per_group) continue;
    const auto& cx = cols[index[cand.name]];
    bool excluded = false;
    for (const auto& sel : report.selected) {
      if (!config.cross_group_exclusion && sel.group != cand.group) continue;
      const double r = dcor(cx, cols[index[sel.name]]);
      if (r > config.exclusion_threshold) {
        report.exclusions.push_back({cand.name, sel.name, r});
        excluded = true;
        break;
      }
    }
    if (excluded) continue;
    report.selected.push_back(cand);
    ++taken[cand.group];
  }
  for (FeatureGroup g : {FeatureGroup::energy_use, FeatureGroup::boundary, FeatureGroup::cv}) {
    if (taken[g] < config.per_group) {
      spdlog::info("feature group {} yields {} of {} features", to_string(g), taken[g], config.per_group);
    }
  }
  if (!report.selected.empty()) report.ordering = order_features(report, report.selected.size());
  return report;
}

SelectionReport select_features(const VEDataset& dataset, const TransformSpec& spec, const SelectionConfig& config) {
  std::vector<NamedColumn> columns;
  for (const auto& name : dataset.feature_names) {
    NamedColumn c{name, feature_info(name).group, dataset.column(name)};
    const auto& t = spec.at(name);
    for (double& v : c.values) v = t.forward(v);
    columns.push_back(std::move(c));
  }
  auto target = dataset.column("target_cvrmse");
  const auto& tt = spec.at("target_cvrmse");
  for (double& v : target) v = tt.forward(v);
  return select_features(columns, target, config);
}

std::vector<std::string> order_features(const SelectionReport& report, std::size_t k) {
  if (k == 0) throw InputError("feature ordering needs k >= 1");
  if (k > report.selected.size()) throw InputError("cannot order more features than were selected");
  std::map<FeatureGroup, std::vector<RankedFeature>> remaining;
  for (const auto& f : report.selected) remaining[f.group].push_back(f);
  for (auto& [g, list] : remaining) std::sort(list.begin(), list.end(), ranked_before);
  std::map<FeatureGroup, std::size_t> used;

  std::vector<std::string> out;
  while (out.size() < k) {
    const RankedFeature* best = nullptr;
    std::size_t best_used = 0;
    FeatureGroup best_group{};
    for (const auto& [g, list] : remaining) {
      const std::size_t u = used[g];
      if (u >= list.size()) continue;
      const RankedFeature& head = list[u];
      if (best == nullptr || u < best_used || (u == best_used && ranked_before(head, *best))) {
        best = &head;
        best_used = u;
        best_group = g;
      }
    }
    out.push_back(best->name);
    ++used[best_group];
  }
  return out;
}

std::vector<std::string> order_features_with(const SelectionReport& report, std::size_t k, const std::string& required) {
  auto out = order_features(report, k);
  if (std::find(out.begin(), out.end(), required) != out.end()) return out;
  const bool ranked = std::any_of(report.ranking.begin(), report.ranking.end(),
                                  [&](const RankedFeature& r) { return r.name == required; });
  if (!ranked) throw InputError("feature '" + required + "' was not ranked");
  for (const auto& e : report.exclusions) {
    if (e.feature != required) continue;
    const auto it = std::find(out.begin(), out.end(), e.conflicting);
    if (it != out.end()) {
      *it = required;
      return out;
    }
  }
  out.back() = required;
  return out;
}

bool selection_respects_constraints(const SelectionReport& report, std::span<const NamedColumn> features,
                                    const SelectionConfig& config) {
  std::map<FeatureGroup, int> count;
  for (const auto& f : report.selected) {
    if (++count[f.group] > config.per_group) return false;
  }
  std::map<std::string, const NamedColumn*> by_name;
  for (const auto& f : features) by_name[f.name] = &f;
  const std::size_t n = features.empty() ? 0 : features.front().values.size();
  const auto rows = strided_rows(n, config.max_rows);
  for (std::size_t i = 0; i < report.selected.size(); ++i) {
    for (std::size_t j = i + 1; j < report.selected.size(); ++j) {
      const auto& a = report.selected[i];
      const auto& b = report.selected[j];
      if (!config.cross_group_exclusion && a.group != b.group) continue;
      auto ia = by_name.find(a.name), ib = by_name.find(b.name);
      if (ia == by_name.end() || ib == by_name.end()) return false;
      if (dcor(take(ia->second->values, rows), take(ib->second->values, rows)) > config.exclusion_threshold) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace uberr
