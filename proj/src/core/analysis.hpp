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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "common.hpp"
#include "device.hpp"
#include "holonomic.hpp"

namespace qlink::analysis {

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// |<a|b>| for normalized pure states.
double state_fidelity(const StateVector& a, const StateVector& b);

/// 1 - (|Tr(V^dag U)| / d)^2.
double gate_loss(const Operator& ideal, const Operator& actual);

/// Population outside {|10>, |01>} and the ground state of the model basis.
double leakage(const StateVector& psi, const device::ModelBasis& basis);
double leakage(const DensityMatrix& rho, const device::ModelBasis& basis);
/// Full tensor-product space: weight of every state with a cable photon or a
/// qubit above level 1.
double leakage(const StateVector& psi, const hilbert::HilbertSpace& space, std::size_t qubits = 2);

/// Final population of each cable mode.
std::vector<double> mode_populations(const StateVector& psi, const device::ModelBasis& basis);

struct SubspaceState {
  DensityMatrix rho;  ///< 2x2 on {|10>, |01>}, unit trace
  double discarded = 0.0;
};

SubspaceState subspace_state(const StateVector& psi, const device::ModelBasis& basis);
SubspaceState subspace_state(const DensityMatrix& rho, const device::ModelBasis& basis);

struct ErrorFit {
  double epsilon = 0.0;  ///< error per gate, clamped to [0, 1]
  double slope = 0.0;    ///< raw fitted slope
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS residual
  std::vector<int> counts;
  std::vector<double> populations;
};

/// Least-squares fit population = p0 - eps * n.
ErrorFit fit_linear_error(std::span<const int> counts, std::span<const double> populations);

/// Evaluates population(n) for n = 1..n_max and fits the line. Points after the
/// population first drops below 0.1 are discarded; fewer than 3 usable points
/// raises kFitUnreliable.
ErrorFit repeated_gate_error(const std::function<double(int)>& population, int n_max);

/// Sequential applications of `schedule` from |10>. The recorded population is
/// the overlap with V^n |10>, V the ideal target.
ErrorFit repeated_gate_error(const device::DeviceSpec& device, const holonomic::GateSchedule& schedule, int n_max,
                             const std::optional<device::NoiseSpec>& noise = std::nullopt,
                             const holonomic::SimulationOptions& options = {});

struct CompensatedError {
  ErrorFit total;
  ErrorFit dissipation;  ///< reference: free decay for each gate duration, then the ideal gate
  double coherent = 0.0;
};

CompensatedError decoherence_compensated_error(const device::DeviceSpec& device,
                                               const holonomic::GateSchedule& schedule, int n_max,
                                               const std::optional<device::NoiseSpec>& noise,
                                               const holonomic::SimulationOptions& options = {});

struct RobustnessCurve {
  std::vector<double> detuning_mhz;
  std::vector<double> loss_holonomic;
  std::vector<double> loss_dynamic;
  double reference_mhz = 3.0;
  double reference_holonomic = 0.0;
  double reference_dynamic = 0.0;
  double relative_improvement = 0.0;
};

/// Shifts the target mode by each detuning (drives fixed) and records
/// 1 - P(|01>) for both schedules.
RobustnessCurve robustness_sweep(const device::DeviceSpec& device, const holonomic::GateSchedule& holonomic,
                                 const holonomic::GateSchedule& dynamic, std::span<const double> detuning_mhz,
                                 const std::optional<device::NoiseSpec>& noise = std::nullopt,
                                 const holonomic::SimulationOptions& options = {}, int workers = 1,
                                 double reference_mhz = 3.0);

}  // namespace qlink::analysis
