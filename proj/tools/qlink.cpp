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

// Command-line runner: qlink <scenario> --config <path> [--out <dir>] [--seed <u64>] [--workers <n>]

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlink/qlink.h"

namespace {

// Prints the error record and, when an output directory is known, saves it.
int report(qlink_status status, const std::string& out_dir) {
  char* record = qlink_error_json(status, qlink_last_error());
  const std::string text = record ? record : "{}";
  qlink_string_free(record);
  std::cerr << text << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream(std::filesystem::path(out_dir) / "error.json") << text << '\n';
  }
  return static_cast<int>(status) == 0 ? 1 : static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> scenarios;
  for (size_t k = 0; k < qlink_scenario_count(); ++k) scenarios.emplace_back(qlink_scenario_name(k));

  CLI::App app{"Remote holonomic gate simulator"};
  std::string scenario, config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("scenario", scenario, "Scenario to run")->required()->check(CLI::IsMember(scenarios));
  app.add_option("--config", config_path, "Experiment config file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized initialization");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag_callback("--version", [] {
    std::cout << "qlink " << qlink_version() << '\n';
    throw CLI::Success();
  });
  CLI11_PARSE(app, argc, argv);

  qlink_config* config = nullptr;
  if (const auto status = qlink_config_load(config_path.c_str(), &config); status != QLINK_OK) {
    return report(status, out_dir);
  }
  qlink_result* result = nullptr;
  const auto status = qlink_run(config, scenario.c_str(), out_opt->count() ? out_dir.c_str() : nullptr,
                                seed_opt->count() ? 1 : 0, seed, workers, &result);
  if (status != QLINK_OK) {
    if (out_dir.empty()) out_dir = qlink_config_output_dir(config);
    qlink_config_free(config);
    return report(status, out_dir);
  }
  std::cout << qlink_result_summary(result) << '\n';
  for (size_t k = 0; k < qlink_result_file_count(result); ++k) std::cerr << "wrote " << qlink_result_file(result, k) << '\n';
  qlink_result_free(result);
  qlink_config_free(config);
  return 0;
}
