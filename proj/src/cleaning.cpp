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

#include "uberr/cleaning.hpp"

#include <algorithm>
#include <cmath>

#include "uberr/errors.hpp"

namespace uberr {

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::none: return "";
    case RejectReason::outlier_3sigma: return "outlier_3sigma";
    case RejectReason::inconsistent: return "inconsistent";
    case RejectReason::atypical_hdd: return "atypical_hdd";
    case RejectReason::manual: return "manual";
  }
  return "";
}

RejectReason parse_reject_reason(std::string_view text) {
  for (auto r : {RejectReason::none, RejectReason::outlier_3sigma, RejectReason::inconsistent,
                 RejectReason::atypical_hdd, RejectReason::manual}) {
    if (to_string(r) == text) return r;
  }
  throw InputError("unknown reject reason '" + std::string(text) + "'");
}

std::string_view to_string(SeasonVerdict verdict) {
  switch (verdict) {
    case SeasonVerdict::kept: return "kept";
    case SeasonVerdict::rejected_low_correlation: return "rejected_low_correlation";
    case SeasonVerdict::rejected_insufficient_data: return "rejected_insufficient_data";
  }
  return "";
}

std::size_t CleaningMask::rejected_count() const {
  return static_cast<std::size_t>(std::count_if(reasons_.begin(), reasons_.end(),
                                                [](RejectReason r) { return r != RejectReason::none; }));
}

void CleaningMask::reject(std::size_t i, RejectReason why) {
  if (why == RejectReason::none) throw InputError("a rejection needs a reason");
  if (reasons_.at(i) == RejectReason::none) reasons_[i] = why;
}

CleaningMask CleaningMask::combine(const CleaningMask& other) const {
  if (other.size() != size()) throw InputError("cannot combine masks of different lengths");
  CleaningMask out = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    if (out.reasons_[i] == RejectReason::none) out.reasons_[i] = other.reasons_[i];
  }
  return out;
}

CleaningMask sigma_filter(const TimeSeries& series, int window_days) {
  if (window_days < 7) throw InputError("sigma_filter window must be at least 7 days");
  const std::size_t n = series.size();
  CleaningMask mask(n);
  if (n == 0) return mask;

  // Shift by the global mean before accumulating squares.
  const auto present = series.present_values();
  if (present.empty()) return mask;
  double center = 0.0;
  for (double v : present) center += v;
  center /= static_cast<double>(present.size());

  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  std::vector<std::size_t> cnt(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = series[i];
    const double d = v ? *v - center : 0.0;
    s1[i + 1] = s1[i] + d;
    s2[i + 1] = s2[i] + d * d;
    cnt[i + 1] = cnt[i] + (v ? 1 : 0);
  }

  const std::size_t half = static_cast<std::size_t>(window_days) * 24 / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (!series[i]) continue;
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half);
    const std::size_t c = cnt[hi] - cnt[lo];
    if (c < 24) continue;
    const double mean = (s1[hi] - s1[lo]) / static_cast<double>(c);
    const double var = std::max(0.0, (s2[hi] - s2[lo]) / static_cast<double>(c) - mean * mean);
    const double dev = std::abs(*series[i] - center - mean);
    const double scale = std::max(1.0, std::abs(mean + center));
    if (dev > 3.0 * std::sqrt(var) && dev > 1e-9 * scale) mask.reject(i, RejectReason::outlier_3sigma);
  }
  return mask;
}

CleaningMask consistency_check(const TimeSeries& power, const TimeSeries& flow,
                               const TimeSeries& supply, const TimeSeries& return_t, double tol,
                               double floor_kw) {
  if (!power.aligned_with(flow) || !power.aligned_with(supply) || !power.aligned_with(return_t)) {
    throw InputError("consistency_check needs four aligned series");
  }
  CleaningMask mask(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) {
    if (!power[i] || !flow[i] || !supply[i] || !return_t[i]) continue;
    const double hydraulic = kWaterHeatCapacity * *flow[i] * (*supply[i] - *return_t[i]);
    const double rel = std::abs(*power[i] - hydraulic) / std::max(*power[i], floor_kw);
    if (rel > tol) mask.reject(i, RejectReason::inconsistent);
  }
  return mask;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson needs equal lengths");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SeasonScreen> hdd_screen(std::span<const DailyValue> daily_energy,
                                     std::span<const DailyValue> daily_hdd,
                                     std::span<const HeatingSeason> seasons, double r_min) {
  if (daily_energy.size() != daily_hdd.size()) throw InputError("hdd_screen needs aligned daily sequences");
  std::vector<SeasonScreen> out;
  for (const auto& season : seasons) {
    std::vector<double> e, h;
    for (std::size_t i = 0; i < daily_energy.size(); ++i) {
      if (daily_energy[i].date != daily_hdd[i].date) throw InputError("hdd_screen dates are misaligned");
      const Date d = daily_energy[i].date;
      if (d < season.start_date || d > season.end_date) continue;
      if (!daily_energy[i].value || !daily_hdd[i].value) continue;
      e.push_back(*daily_energy[i].value);
      h.push_back(*daily_hdd[i].value);
    }
    SeasonScreen s;
    s.season = season.label;
    s.valid_days = static_cast<int>(e.size());
    if (e.empty()) continue;  // season not touched by the data
    if (s.valid_days < 14) {
      s.verdict = SeasonVerdict::rejected_insufficient_data;
    } else {
      s.correlation = pearson(e, h);
      s.verdict = s.correlation < r_min ? SeasonVerdict::rejected_low_correlation : SeasonVerdict::kept;
    }
    out.push_back(std::move(s));
  }
  return out;
}

TimeSeries apply_mask(const TimeSeries& series, const CleaningMask& mask) {
  if (mask.size() != series.size()) throw InputError("mask length does not match the series");
  std::vector<std::optional<double>> out(series.values().begin(), series.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.keep(i)) out[i] = std::nullopt;
  }
  return TimeSeries(series.start(), std::move(out), series.unit());
}

CleaningResult clean_substation(const SubstationMeasurements& m, const WeatherSeries& weather,
                                std::span<const HeatingSeason> seasons, const CleaningConfig& cfg,
                                std::span<const MaskProvider> extra) {
  CleaningMask mask = sigma_filter(m.heat_power, cfg.window_days)
                          .combine(consistency_check(m.heat_power, m.flow, m.supply_temp, m.return_temp,
                                                     cfg.consistency_tol, cfg.consistency_floor_kw));
  for (const auto& provider : extra) mask = mask.combine(provider(m));

  // Daily energy of the filtered series vs daily HDD of the weather.
  const TimeSeries filtered = apply_mask(m.heat_power, mask);
  const auto daily_load = daily_mean(filtered);
  const auto daily_temp = daily_mean(weather.temperature);
  std::vector<DailyValue> energy, hdd_days;
  for (const auto& d : daily_load) {
    energy.push_back({d.date, d.value ? std::optional<double>(*d.value * 24.0) : std::nullopt});
  }
  for (const auto& d : daily_temp) {
    hdd_days.push_back({d.date, d.value ? std::optional<double>(std::max(0.0, cfg.hdd_base_c - *d.value))
                                        : std::nullopt});
  }
  // Align the weather days onto the measurement days.
  std::vector<DailyValue> hdd_aligned;
  for (const auto& d : energy) {
    auto it = std::find_if(hdd_days.begin(), hdd_days.end(), [&](const DailyValue& h) { return h.date == d.date; });
    hdd_aligned.push_back(it != hdd_days.end() ? *it : DailyValue{d.date, std::nullopt});
  }

  CleaningResult res;
  res.substation_id = m.id;
  res.seasons = hdd_screen(energy, hdd_aligned, seasons, cfg.r_min);
  for (const auto& screen : res.seasons) {
    if (screen.verdict == SeasonVerdict::kept) continue;
    const auto season = std::find_if(seasons.begin(), seasons.end(),
                                      [&](const HeatingSeason& s) { return s.label == screen.season; });
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const Date d = date_of(m.heat_power.time_at(i));
      if (d >= season->start_date && d <= season->end_date && mask.keep(i)) {
        mask.reject(i, RejectReason::atypical_hdd);
      }
    }
  }
  res.cleaned_power = apply_mask(m.heat_power, mask);
  res.mask = std::move(mask);
  return res;
}

}  // namespace uberr
