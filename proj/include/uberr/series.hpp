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

#ifndef UBERR_SERIES_HPP_
#define UBERR_SERIES_HPP_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uberr {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_time<std::chrono::hours>;

enum class Unit { kW, degC, W_per_m2, m3_per_h };

std::string_view to_string(Unit unit);

Date make_date(int year, unsigned month, unsigned day);
// "YYYY-MM-DD"
std::string format_date(Date date);
Date parse_date(std::string_view text);
// "YYYY-MM-DDTHH:00:00Z"
std::string format_timestamp(Timestamp ts);
Timestamp parse_timestamp(std::string_view text);

inline Timestamp to_timestamp(Date date) { return Timestamp(date); }
// Hour of day in [0, 24).
int hour_of_day(Timestamp ts);
Date date_of(Timestamp ts);

/// Hourly series with implicit timestamps: slot i is `start + i` hours.
/// Missing slots are empty optionals. Immutable once built.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(Timestamp start, std::vector<std::optional<double>> values, Unit unit);
  // Convenience for fully observed data.
  static TimeSeries dense(Timestamp start, std::span<const double> values, Unit unit);

  Timestamp start() const { return start_; }
  // One past the last slot.
  Timestamp end() const { return start_ + std::chrono::hours(values_.size()); }
  Timestamp time_at(std::size_t i) const { return start_ + std::chrono::hours(i); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Unit unit() const { return unit_; }

  const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::optional<double>> values() const { return values_; }
  bool is_missing(std::size_t i) const { return !values_[i].has_value(); }

  std::size_t missing_count() const;
  // Present values in slot order.
  std::vector<double> present_values() const;
  // Index of `ts` inside the series, if covered.
  std::optional<std::size_t> index_of(Timestamp ts) const;

  bool aligned_with(const TimeSeries& other) const {
    return start_ == other.start_ && values_.size() == other.values_.size();
  }

 private:
  Timestamp start_{};
  std::vector<std::optional<double>> values_;
  Unit unit_ = Unit::kW;
};

struct CalendarWindow {
  Date start;
  int length_days = 7;

  Date end() const { return start + std::chrono::days(length_days); }  // exclusive
  std::size_t slots() const { return static_cast<std::size_t>(length_days) * 24; }
  bool contains(Date d) const { return d >= start && d < end(); }
  bool operator==(const CalendarWindow&) const = default;
};

/// Inclusive date range [start_date, end_date].
struct HeatingSeason {
  std::string label;
  Date start_date;
  Date end_date;

  bool covers(const CalendarWindow& w) const {
    return w.start >= start_date && w.end() - std::chrono::days(1) <= end_date;
  }
};

// Throws InputError on start >= end or overlapping seasons.
void validate_seasons(std::span<const HeatingSeason> seasons);
// First season fully containing the window.
const HeatingSeason* season_of(std::span<const HeatingSeason> seasons, const CalendarWindow& w);
// October 1 to May 31 seasons touching [first, last].
std::vector<HeatingSeason> default_seasons(Date first, Date last);

/// Window of `series`; throws RangeError when the window is not fully covered.
TimeSeries slice(const TimeSeries& series, const CalendarWindow& window);

/// Missing slots expressed in days (count / 24).
double missing_days(const TimeSeries& series);

struct DailyValue {
  Date date;
  std::optional<double> value;
};

/// Per-day mean over present slots; a day with no present slot yields nullopt.
/// The series must start at midnight and span whole days.
std::vector<DailyValue> daily_mean(const TimeSeries& series);

}  // namespace uberr

#endif  // UBERR_SERIES_HPP_
