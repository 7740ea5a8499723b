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
#include <functional>
#include <span>
#include <vector>

#include "common.hpp"
#include "device.hpp"
#include "holonomic.hpp"
#include "pulse.hpp"

namespace qlink::optimize {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iterations = 1000;
  /// Stop once |loss_k - loss_{k-1}| falls below this; 0 disables.
  double tolerance = 0.0;
  double fd_step = 1e-4;

  void validate() const;
};

struct OptimizationResult {
  std::vector<double> best_parameters;
  double best_loss = 0.0;
  std::vector<double> history;  ///< loss at every evaluated iterate, starting with x0
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;
using Gradient = std::function<std::vector<double>(std::span<const double>)>;

/// Central differences; coordinates are evaluated on `workers` threads, so
/// `f` must be safe to call concurrently when workers > 1.
std::vector<double> finite_difference_gradient(const Objective& f, std::span<const double> x, double h,
                                               int workers = 1);

/// Adam with bias-corrected moments. Uses `gradient` when given, otherwise
/// central differences with config.fd_step.
OptimizationResult adam_minimize(const Objective& f, std::vector<double> x0, const AdamConfig& config,
                                 const Gradient& gradient = {}, int workers = 1);

struct GridConfig {
  double coarse_step_mhz = 2.0;
  std::vector<double> refine_steps_mhz{0.5, 0.1, 0.025};
  int workers = 1;

  void validate() const;
};

enum class FrequencyObjective {
  kLeakage,       ///< mode population after the gate from |10>
  kTransferLoss,  ///< 1 - P(|01>); used in the lab frame with dressed states
};

struct FrequencySearch {
  double q1_ghz = 0.0;
  double q2_ghz = 0.0;
  double objective = 0.0;
  double leakage = 0.0;
  double coarse_best = 0.0;
  std::size_t evaluations = 0;
  holonomic::GateSchedule schedule;
};

/// Ladder device at `fsr_mhz` built from `base` (its qubit frequencies are
/// replaced during the search; explicit mode lists and lengths are dropped).
device::DeviceSpec ladder_from(const device::RawDevice& base, double fsr_mhz);

/// Coarse-to-fine search of omega_Q1 in (M2, M2 + FSR) and omega_Q2 in
/// (M2 - FSR, M2) for the SWAP synthesized from `shape` and `averages_mhz`.
/// Each refinement level scans +-(previous step) around the current best.
FrequencySearch optimize_frequencies(const device::DeviceSpec& device, const pulse::Envelope& shape,
                                     std::array<double, 2> averages_mhz, const GridConfig& grid,
                                     holonomic::Frame frame = holonomic::Frame::kRotating,
                                     const holonomic::SimulationOptions& options = {});

struct WaveformConfig {
  AdamConfig adam;
  holonomic::GateTarget target = holonomic::GateTarget::swap();
  std::array<double, 2> averages_mhz{5.0, 5.0};
  std::size_t knots = pulse::kDefaultKnotCount;
  bool optimize_detuning = false;
  /// Starting parameters; empty means cosine-equivalent knots and zero detuning.
  std::vector<double> initial_parameters;
  holonomic::SimulationOptions simulation;
  int workers = 1;
};

struct WaveformResult {
  OptimizationResult optimization;
  pulse::Envelope envelope = pulse::Envelope::square(1.0, 0.0);  ///< best lead shape
  std::array<double, 2> detuning_mhz{0.0, 0.0};
  holonomic::GateSchedule schedule;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double baseline_leakage = 0.0;  ///< true cosine envelope
  double final_leakage = 0.0;
  std::vector<double> baseline_modes;
  std::vector<double> final_modes;
};

/// Schedule for knot parameters (absolute values taken) and optional detunings.
holonomic::GateSchedule waveform_schedule(const device::DeviceSpec& device, const WaveformConfig& config,
                                          std::span<const double> parameters);

/// Adam over pinned knot amplitudes (and optionally delta_1, delta_2) against
/// the trace loss of the {|10>, |01>} block. Every evaluation re-synthesizes
/// the schedule, so the averages and the cyclic condition hold throughout.
WaveformResult optimize_waveform(const device::DeviceSpec& device, const WaveformConfig& config);

}  // namespace qlink::optimize
