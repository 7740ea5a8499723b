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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "device.hpp"
#include "holonomic.hpp"
#include "optimize.hpp"
#include "pulse.hpp"

namespace qlink::config {

/// Parsed experiment configuration. Every value is optional at the text
/// level; absent keys keep the defaults below.
struct ExperimentConfig {
  device::RawDevice device;

  // [pulse]
  pulse::EnvelopeKind envelope = pulse::EnvelopeKind::kCosine;
  double sigma_fraction = pulse::kDefaultSigmaFraction;
  std::vector<double> knots;  // parameterized envelopes only
  double dt_ns = hilbert::kDefaultStep;
  device::Expansion expansion = device::Expansion::kJacobiAnger;
  holonomic::Frame frame = holonomic::Frame::kRotating;

  // [gate]
  holonomic::GateLabel gate = holonomic::GateLabel::kSwap;
  double theta_rad = std::numbers::pi / 2.0;
  double phi_rad = std::numbers::pi;
  std::optional<double> effective_avg_mhz;
  std::optional<double> g12_avg_mhz;
  std::optional<double> g22_avg_mhz;
  std::array<double, 2> delta_mhz{0.0, 0.0};
  bool calibrate = false;

  // [noise]
  bool has_noise = false;
  device::NoiseSpec noise;

  // [sweep]
  double detuning_min_mhz = -3.0;
  double detuning_max_mhz = 3.0;
  double detuning_step_mhz = 0.5;
  double reference_detuning_mhz = 3.0;
  std::vector<double> fsr_list_mhz;
  int n_max = 20;
  int time_points = 201;

  // [optimizer]
  optimize::AdamConfig adam;
  bool optimize_detuning = false;
  double init_jitter = 0.0;
  optimize::GridConfig grid;

  // [output]
  std::string directory = "out";
  bool write_csv = true;
  bool write_json = true;

  // [run]
  std::uint64_t seed = 0;
  int workers = 1;

  std::vector<std::string> sections;  ///< sections present in the source text

  bool has_section(const std::string& name) const;
  device::DeviceSpec build_device() const;
  holonomic::GateTarget target() const;
  /// Lead envelope shape on unit duration and peak.
  pulse::Envelope shape() const;
  std::array<double, 2> averages_mhz() const;
  holonomic::SimulationOptions simulation() const;
  std::vector<double> detuning_grid() const;
};

/// Parses the sectioned `key = value` format. Unknown sections or keys,
/// malformed values and missing [device] / [gate] sections raise kParse with
/// the key and line number in the message.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Writes every key with its current value; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace qlink::config
