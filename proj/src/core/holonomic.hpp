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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "device.hpp"
#include "hilbert.hpp"
#include "pulse.hpp"

namespace qlink::holonomic {

enum class GateLabel { kSwap, kSqrtSwap, kCustom };

std::string_view to_string(GateLabel label);
GateLabel parse_gate_label(std::string_view name);

/// Reflection U(theta, phi) on {|10>, |01>}.
struct GateTarget {
  double theta = std::numbers::pi / 2.0;
  double phi = std::numbers::pi;
  GateLabel label = GateLabel::kSwap;

  static GateTarget swap();
  static GateTarget sqrt_swap(double phi = std::numbers::pi);
  static GateTarget custom(double theta, double phi);
  void validate() const;
};

/// [[cos t, e^{i p} sin t], [e^{-i p} sin t, -cos t]].
Operator target_unitary(double theta, double phi);
inline Operator target_unitary(const GateTarget& t) { return target_unitary(t.theta, t.phi); }

/// Required ratio of effective couplings g12 / g22 = -e^{i phi} tan(theta / 2).
Complex coupling_ratio(const GateTarget& target);

enum class Frame { kRotating, kLab };

/// Executable gate: drives placed on a common clock starting at 0.
struct GateSchedule {
  std::vector<pulse::DriveSignal> drives;
  double duration_ns = 0.0;
  GateTarget target;
  Frame frame = Frame::kRotating;
  /// Peak modulation index per drive, |A| / |omega_M2 - omega_Q|.
  std::vector<double> peak_index;
};

/// Envelope averages g^a_12, g^a_22 that realize `target` at the given norm
/// sqrt(g12^2 + g22^2).
std::array<double, 2> target_averages(const GateTarget& target, double effective_average_mhz);

/// Builds a two-drive holonomic schedule. Both drives share `shape` (its kind
/// and knots; duration and peak are overwritten). The peak amplitudes are
/// solved so the envelope averages match `averages_mhz`, the relative phase
/// realizes phi, and the duration satisfies the cyclic condition: the
/// angular time integral of g_eff(t) equals pi.
GateSchedule synthesize_drives(const device::DeviceSpec& device, const GateTarget& target,
                               const pulse::Envelope& shape, std::array<double, 2> averages_mhz,
                               std::array<double, 2> detuning_mhz = {0.0, 0.0});
GateSchedule synthesize_drives(const device::DeviceSpec& device, const GateTarget& target,
                               const pulse::Envelope& shape, double effective_average_mhz);

/// Recomputes amplitudes, modulation frequencies and phases of a schedule for
/// new qubit frequencies, keeping every peak modulation index.
GateSchedule retune(const GateSchedule& schedule, const device::DeviceSpec& device);

/// Complex ratio of the envelope-averaged effective couplings of the first two drives.
Complex implied_ratio(const GateSchedule& schedule, const device::DeviceSpec& device);

/// Time integral of the effective holonomic coupling, rad.
double cyclic_area(const GateSchedule& schedule, const device::DeviceSpec& device);

/// Non-geometric comparison gate: a pi transfer Q1 -> M2 followed by M2 -> Q2,
/// each with the peak modulation index of the matching holonomic drive.
GateSchedule dynamic_baseline_schedule(const device::DeviceSpec& device, const GateSchedule& holonomic);

struct SimulationOptions {
  device::Expansion expansion = device::Expansion::kJacobiAnger;
  double dt_ns = hilbert::kDefaultStep;
  /// Caller-owned Bessel table reused across runs with equal modulation indices.
  std::shared_ptr<const device::DriveTable>* table_cache = nullptr;
  /// Lab frame only: states are given and returned in the dressed basis.
  bool dressed = false;
};

/// Model-basis index of the single-excitation states (Q1, Q2, modes...).
device::ModelBasis model_basis(const device::DeviceSpec& device, bool with_ground = false);

/// Closed-system final state of the schedule from `psi0` (model basis without ground).
StateVector run_schedule(const device::DeviceSpec& device, const GateSchedule& schedule, const StateVector& psi0,
                         const SimulationOptions& options = {});

/// Same, from |10>.
StateVector run_from_10(const device::DeviceSpec& device, const GateSchedule& schedule,
                        const SimulationOptions& options = {});

/// Closed-system 2x2 block of the propagator on {|10>, |01>}.
Operator subspace_block(const device::DeviceSpec& device, const GateSchedule& schedule,
                        const SimulationOptions& options = {});

/// Closed-system propagator on the model basis (no ground state).
Operator schedule_propagator(const device::DeviceSpec& device, const GateSchedule& schedule,
                             const SimulationOptions& options = {});

/// Population trajectory on `grid`; with noise the ground state is included.
hilbert::Trajectory simulate(const device::DeviceSpec& device, const GateSchedule& schedule,
                             const StateVector& psi0, std::span<const double> grid,
                             const std::optional<device::NoiseSpec>& noise = std::nullopt,
                             const SimulationOptions& options = {});

/// Final density matrix (model basis with ground) after the schedule under noise.
DensityMatrix run_open(const device::DeviceSpec& device, const GateSchedule& schedule, const DensityMatrix& rho0,
                       const device::NoiseSpec& noise, const SimulationOptions& options = {});

/// Adds a common offset to every drive frequency (and recorded detuning).
GateSchedule offset_detuning(const GateSchedule& schedule, double offset_mhz);

/// Common drive-frequency offset within +-span that maximizes the overlap of
/// the final state from |10> with V|10>; compensates dispersive shifts.
/// Golden-section search to 1e-3 MHz.
double calibrate_detuning(const device::DeviceSpec& device, const GateSchedule& schedule,
                          const SimulationOptions& options = {}, double span_mhz = 3.0);

/// Uniform grid of `points` samples over [0, duration].
std::vector<double> uniform_grid(double duration, int points);

}  // namespace qlink::holonomic
