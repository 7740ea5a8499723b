// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace qlink::experiment {

const std::vector<std::string>& scenario_names();

struct RunOptions {
  std::optional<std::string> out_dir;  ///< overrides [output] directory
  std::optional<std::uint64_t> seed;   ///< overrides [run] seed
  std::optional<int> workers;          ///< overrides [run] workers
};

struct RunResult {
  std::string summary_json;
  std::vector<std::string> files;
};

/// Runs one scenario and writes its CSV files and JSON summary.
RunResult run_experiment(const config::ExperimentConfig& config, const std::string& scenario,
                         const RunOptions& options = {});

/// Machine-readable error record.
std::string error_json(int code, const std::string& message);

}  // namespace qlink::experiment
