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

#include "uberr/series.hpp"

#include <algorithm>
#include <cstdio>

#include "uberr/errors.hpp"

namespace uberr {

using std::chrono::days;
using std::chrono::hours;

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::kW: return "kW";
    case Unit::degC: return "degC";
    case Unit::W_per_m2: return "W_per_m2";
    case Unit::m3_per_h: return "m3_per_h";
  }
  return "?";
}

Date make_date(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) throw InputError("invalid calendar date");
  return Date(ymd);
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  const std::string s(text);
  char tail = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw InputError("malformed date '" + s + "', expected YYYY-MM-DD");
  }
  return make_date(y, m, d);
}

std::string format_timestamp(Timestamp ts) {
  return format_date(date_of(ts)) + "T" + (hour_of_day(ts) < 10 ? "0" : "") +
         std::to_string(hour_of_day(ts)) + ":00:00Z";
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2uZ", &y, &mo, &d, &h, &mi, &se) != 6 ||
      h > 23 || mi != 0 || se != 0 || s.size() != 20) {
    throw InputError("malformed timestamp '" + s + "', expected YYYY-MM-DDTHH:00:00Z");
  }
  return to_timestamp(make_date(y, mo, d)) + hours(h);
}

int hour_of_day(Timestamp ts) {
  const auto since_midnight = ts - Timestamp(date_of(ts));
  return static_cast<int>(since_midnight.count());
}

Date date_of(Timestamp ts) { return std::chrono::floor<days>(ts); }

TimeSeries::TimeSeries(Timestamp start, std::vector<std::optional<double>> values, Unit unit)
    : start_(start), values_(std::move(values)), unit_(unit) {}

TimeSeries TimeSeries::dense(Timestamp start, std::span<const double> values, Unit unit) {
  std::vector<std::optional<double>> v(values.begin(), values.end());
  return TimeSeries(start, std::move(v), unit);
}

std::size_t TimeSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return !v; }));
}

std::vector<double> TimeSeries::present_values() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::optional<std::size_t> TimeSeries::index_of(Timestamp ts) const {
  if (ts < start_ || ts >= end()) return std::nullopt;
  return static_cast<std::size_t>((ts - start_).count());
}

void validate_seasons(std::span<const HeatingSeason> seasons) {
  for (std::size_t i = 0; i < seasons.size(); ++i) {
    if (!(seasons[i].start_date < seasons[i].end_date)) {
      throw InputError("heating season '" + seasons[i].label + "' must start before it ends");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (seasons[i].start_date <= seasons[j].end_date &&
          seasons[j].start_date <= seasons[i].end_date) {
        throw InputError("heating seasons '" + seasons[j].label + "' and '" + seasons[i].label +
                         "' overlap");
      }
    }
  }
}

const HeatingSeason* season_of(std::span<const HeatingSeason> seasons, const CalendarWindow& w) {
  for (const auto& s : seasons) {
    if (s.covers(w)) return &s;
  }
  return nullptr;
}

std::vector<HeatingSeason> default_seasons(Date first, Date last) {
  const int y0 = static_cast<int>(std::chrono::year_month_day{first}.year()) - 1;
  const int y1 = static_cast<int>(std::chrono::year_month_day{last}.year());
  std::vector<HeatingSeason> out;
  for (int y = y0; y <= y1; ++y) {
    HeatingSeason s{std::to_string(y) + "-" + std::to_string(y + 1), make_date(y, 10, 1),
                    make_date(y + 1, 5, 31)};
    if (s.end_date >= first && s.start_date <= last) out.push_back(std::move(s));
  }
  return out;
}

TimeSeries slice(const TimeSeries& series, const CalendarWindow& window) {
  if (window.length_days <= 0) throw InputError("window length must be positive");
  const Timestamp from = to_timestamp(window.start);
  const Timestamp to = to_timestamp(window.end());
  if (from < series.start() || to > series.end()) {
    throw RangeError("window " + format_date(window.start) + " +" +
                     std::to_string(window.length_days) + "d lies outside the series span");
  }
  const auto offset = static_cast<std::size_t>((from - series.start()).count());
  const auto vals = series.values().subspan(offset, window.slots());
  return TimeSeries(from, {vals.begin(), vals.end()}, series.unit());
}

double missing_days(const TimeSeries& series) {
  return static_cast<double>(series.missing_count()) / 24.0;
}

std::vector<DailyValue> daily_mean(const TimeSeries& series) {
  if (hour_of_day(series.start()) != 0 || series.size() % 24 != 0) {
    throw InputError("daily_mean needs a series aligned to whole days");
  }
  std::vector<DailyValue> out;
  out.reserve(series.size() / 24);
  const Date first = date_of(series.start());
  for (std::size_t d = 0; d * 24 < series.size(); ++d) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t h = 0; h < 24; ++h) {
      if (const auto& v = series[d * 24 + h]) {
        sum += *v;
        ++count;
      }
    }
    out.push_back({first + days(d), count > 0 ? std::optional<double>(sum / count) : std::nullopt});
  }
  return out;
}

}  // namespace uberr
