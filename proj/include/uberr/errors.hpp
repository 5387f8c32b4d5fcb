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

#ifndef UBERR_ERRORS_HPP_
#define UBERR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uberr {

// Malformed or inconsistent input (misaligned series, bad parameters, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A window or index falls outside the data it refers to.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A metric or feature is mathematically undefined for the given data
// (zero mean load, zero temperature variation, ...).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed or its inputs are missing.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "': " + cause), stage_(std::move(stage)), cause_(cause) {}
  const std::string& stage() const { return stage_; }
  const std::string& cause() const { return cause_; }

 private:
  std::string stage_;
  std::string cause_;
};

}  // namespace uberr

#endif  // UBERR_ERRORS_HPP_
