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

#ifndef UBERR_CLEANING_HPP_
#define UBERR_CLEANING_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uberr/series.hpp"
#include "uberr/synthetic.hpp"

namespace uberr {

enum class RejectReason { none, outlier_3sigma, inconsistent, atypical_hdd, manual };

std::string_view to_string(RejectReason reason);
RejectReason parse_reject_reason(std::string_view text);

/// Keep/reject flag per slot; every rejected slot carries exactly one reason.
class CleaningMask {
 public:
  CleaningMask() = default;
  explicit CleaningMask(std::size_t size) : reasons_(size, RejectReason::none) {}

  std::size_t size() const { return reasons_.size(); }
  bool keep(std::size_t i) const { return reasons_[i] == RejectReason::none; }
  RejectReason reason(std::size_t i) const { return reasons_[i]; }
  std::size_t rejected_count() const;

  // The first reason recorded for a slot wins.
  void reject(std::size_t i, RejectReason why);

  /// Logical AND of the keep flags; reasons are taken from `*this` first.
  CleaningMask combine(const CleaningMask& other) const;

 private:
  std::vector<RejectReason> reasons_;
};

/// Flags slots deviating more than 3 rolling standard deviations from the
/// rolling mean of a centered `window_days` window. Missing slots are ignored;
/// windows with fewer than 24 present values never flag.
CleaningMask sigma_filter(const TimeSeries& series, int window_days = 14);

/// Flags slots where the metered power disagrees with
/// rho c_p * flow * (supply - return) by more than `tol` relative to
/// max(power, floor_kw).
CleaningMask consistency_check(const TimeSeries& power, const TimeSeries& flow,
                               const TimeSeries& supply, const TimeSeries& return_t,
                               double tol = 0.1, double floor_kw = 1.0);

enum class SeasonVerdict { kept, rejected_low_correlation, rejected_insufficient_data };
std::string_view to_string(SeasonVerdict verdict);

struct SeasonScreen {
  std::string season;
  double correlation = 0.0;
  int valid_days = 0;
  SeasonVerdict verdict = SeasonVerdict::kept;
};

/// Pearson correlation of daily energy against daily HDD within each season.
/// Seasons with r < r_min, or fewer than 14 valid days, are rejected.
std::vector<SeasonScreen> hdd_screen(std::span<const DailyValue> daily_energy,
                                     std::span<const DailyValue> daily_hdd,
                                     std::span<const HeatingSeason> seasons, double r_min = 0.5);

// Plain Pearson r; 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Flagged slots become missing. Throws InputError on length mismatch.
TimeSeries apply_mask(const TimeSeries& series, const CleaningMask& mask);

struct CleaningConfig {
  int window_days = 14;
  double consistency_tol = 0.1;
  double consistency_floor_kw = 1.0;
  double r_min = 0.5;
  double hdd_base_c = 18.0;
};

// Extension point for further detectors (one mask per substation).
using MaskProvider = std::function<CleaningMask(const SubstationMeasurements&)>;

struct CleaningResult {
  std::string substation_id;
  CleaningMask mask;
  TimeSeries cleaned_power;
  std::vector<SeasonScreen> seasons;
};

/// All filters combined for one substation. Seasons rejected by the HDD screen
/// are masked entirely with `atypical_hdd`.
CleaningResult clean_substation(const SubstationMeasurements& m, const WeatherSeries& weather,
                                std::span<const HeatingSeason> seasons, const CleaningConfig& config,
                                std::span<const MaskProvider> extra = {});

}  // namespace uberr

#endif  // UBERR_CLEANING_HPP_
