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

#ifndef UBERR_PIPELINE_HPP_
#define UBERR_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "uberr/config.hpp"

namespace uberr {

struct StageOverrides {
  std::vector<std::string> features;  // explicit model features
  std::optional<std::size_t> n;
  std::optional<std::string> split;
  std::optional<std::size_t> k_min, k_max;
};

struct StageOutcome {
  std::string stage;
  bool reused = false;
  std::vector<std::string> outputs;  // relative to the output directory
};

/// File-based orchestration. Every stage reads its inputs from and writes its
/// artifacts to `out_dir`, and leaves a stamp (config hash, seed, tool
/// version, input and output SHA-256). A stage whose stamp still matches is
/// reused instead of recomputed. Failures are rethrown as StageError.
class Pipeline {
 public:
  Pipeline(RunConfig config, std::string out_dir);

  static const std::vector<std::string>& stages();

  StageOutcome run(const std::string& stage, const StageOverrides& overrides = {}, bool force = false);
  // synth through grid, in order.
  std::vector<StageOutcome> run_all(const StageOverrides& overrides = {}, bool force = false);

  const RunConfig& config() const { return config_; }
  const std::string& config_hash() const { return hash_; }
  std::string path(const std::string& relative) const;

 private:
  RunConfig config_;
  std::string out_dir_;
  std::string hash_;
};

}  // namespace uberr

#endif  // UBERR_PIPELINE_HPP_
