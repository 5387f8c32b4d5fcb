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

#ifndef UBERR_VE_PAIR_HPP_
#define UBERR_VE_PAIR_HPP_

#include <string>

#include "uberr/series.hpp"

namespace uberr {

/// One validation experiment: a model calibrated on `calibration` and
/// evaluated on `validation`, both within the same heating season.
struct VEPair {
  std::string substation_id;
  CalendarWindow calibration;
  CalendarWindow validation;
  std::string season;

  bool operator==(const VEPair&) const = default;
};

}  // namespace uberr

#endif  // UBERR_VE_PAIR_HPP_
