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
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "hilbert.hpp"
#include "pulse.hpp"

namespace qlink::device {

inline constexpr double kDefaultVelocity = 1.209e8;  // m/s, from 15 cm <-> 403 MHz

/// Unvalidated device description. Mode frequencies come either from an
/// explicit list or from a uniform FSR ladder around the center mode.
struct RawDevice {
  std::array<double, 2> qubit_freq_ghz{6.127, 5.712};
  std::array<double, 2> anharmonicity_mhz{-162.0, -162.0};
  int qubit_levels = 3;

  std::vector<double> mode_freqs_ghz;        // explicit form, listed in label order
  std::optional<std::size_t> target_mode;    // index into the explicit list (default: middle)

  std::optional<double> center_mode_ghz;     // ladder form
  std::optional<double> fsr_mhz;
  std::optional<double> length_m;
  int mode_count = 5;

  double velocity_m_per_s = kDefaultVelocity;

  // Coupling magnitudes: one value is broadcast to every mode.
  std::vector<double> g1_mhz{30.26};
  std::vector<double> g2_mhz{26.88};
};

/// Validated two-qubit + multimode-cable device. Modes are indexed j = 0..n-1
/// in label order; `target_mode` is the mediating mode M2. Couplings are
/// signed: g_1j > 0 and g_2j = (-1)^(j - target) |g_2j|.
struct DeviceSpec {
  std::array<double, 2> qubit_freq_ghz{};
  std::array<double, 2> anharmonicity_mhz{};
  int qubit_levels = 3;
  std::vector<double> mode_freq_ghz;
  std::size_t target_mode = 0;
  int target_label = 2;
  std::array<std::vector<double>, 2> coupling_mhz;
  double frame_reference_ghz = 0.0;  // nominal frequency of the target mode
  std::optional<double> fsr_mhz;
  double velocity_m_per_s = kDefaultVelocity;

  std::size_t modes() const { return mode_freq_ghz.size(); }
  std::string mode_label(std::size_t j) const;
  /// omega_M2 - omega_Q in MHz, measured from the frame reference.
  double mode_qubit_detuning_mhz(int qubit) const;
};

DeviceSpec build_device(const RawDevice& raw);

/// Measured device: explicit modes M1 = 6.36, M2 = 5.83, M3 = 5.38 GHz.
DeviceSpec paper_device();
/// Reference-device qubits and couplings on a uniform FSR ladder centered at 5.83 GHz.
DeviceSpec ladder_device(double fsr_mhz, int mode_count = 5);

DeviceSpec with_qubit_frequencies(const DeviceSpec& device, double q1_ghz, double q2_ghz);
/// Shifts the target mode by `shift_mhz`; the frame reference stays put.
DeviceSpec with_target_shift(const DeviceSpec& device, double shift_mhz);

double fsr_from_length(double length_m, double velocity_m_per_s = kDefaultVelocity);
double length_from_fsr(double fsr_mhz, double velocity_m_per_s = kDefaultVelocity);

/// Relaxation and pure-dephasing times in microseconds; absent = lossless.
struct NoiseSpec {
  std::array<std::optional<double>, 2> qubit_t1_us;
  std::array<std::optional<double>, 2> qubit_tphi_us;
  std::optional<double> mode_t1_us;
  std::optional<double> mode_tphi_us;

  bool lossless() const;
  void validate() const;
};

/// Shipped decoherence configuration used by the robustness and error-rate studies.
NoiseSpec default_noise();

/// Single-excitation model basis: optional ground state, then Q1, Q2, then modes.
struct ModelBasis {
  bool ground = false;
  std::size_t modes = 0;

  Eigen::Index dimension() const { return static_cast<Eigen::Index>((ground ? 1 : 0) + 2 + modes); }
  Eigen::Index ground_index() const { return 0; }
  Eigen::Index qubit(int i) const { return (ground ? 1 : 0) + i; }
  Eigen::Index mode(std::size_t j) const { return (ground ? 1 : 0) + 2 + static_cast<Eigen::Index>(j); }
};

/// Collapse operators on the model basis (requires the ground state).
std::vector<Operator> collapse_operators(const DeviceSpec& device, const NoiseSpec& noise, const ModelBasis& basis);

/// Full tensor-product space: two qubits then the cable modes (2 levels each).
hilbert::HilbertSpace device_space(const DeviceSpec& device);

/// Laboratory-frame Hamiltonian on the full space (rad/ns):
/// qubits with anharmonicity, modes, exchange couplings and the diagonal
/// parametric drives.
Operator lab_frame_hamiltonian(const DeviceSpec& device, std::span<const pulse::DriveSignal> drives, double t);

enum class Expansion {
  kJacobiAnger,  // J1 + J2 sidebands of the modulation phase
  kExact,        // full exp(-i F(t))
};

/// Rotating-frame Hamiltonian on the single-excitation basis (Q1, Q2, modes),
/// frame at the reference frequency of the target mode. The default keeps the
/// full phase factor B_i(t); the Jacobi-Anger form keeps only the J1 and J2
/// sidebands and is the default for gate simulation.
Operator rotating_frame_hamiltonian(const DeviceSpec& device, std::span<const pulse::DriveSignal> drives, double t,
                                    Expansion expansion = Expansion::kExact);

/// Precomputed Bessel samples J1, J2 of the modulation index on the uniform
/// half-step grid k * step / 2, shared between models that use the same
/// envelopes and modulation indices.
class DriveTable {
 public:
  DriveTable(std::span<const pulse::DriveSignal> drives, std::span<const double> indices, double half_step,
             double end_time);
  bool matches(std::span<const double> indices, double half_step) const;
  bool lookup(std::size_t drive, double t, double& j1, double& j2) const;

 private:
  std::vector<double> indices_;
  double half_step_;
  std::vector<std::vector<double>> j1_, j2_;
};

/// Time-dependent rotating-frame Hamiltonian usable as a HamiltonianFn.
class RotatingFrameModel {
 public:
  RotatingFrameModel(DeviceSpec device, std::vector<pulse::DriveSignal> drives,
                     Expansion expansion = Expansion::kJacobiAnger, bool with_ground = false);

  const ModelBasis& basis() const { return basis_; }
  Eigen::Index dimension() const { return basis_.dimension(); }
  void operator()(double t, Operator& out) const;

  /// Builds (or adopts, when compatible) the Bessel table for RK4 step `dt`
  /// over [0, end_time].
  void use_table(double dt, double end_time, std::shared_ptr<const DriveTable> shared = nullptr);
  std::shared_ptr<const DriveTable> table() const { return table_; }

  /// RK4 evolution over [0, duration] using the star-shaped coupling pattern
  /// directly instead of dense products. Same step rule as propagate_state.
  StateVector evolve(const StateVector& psi0, double duration, double dt = hilbert::kDefaultStep);

 private:
  void coupling_factors(double t, std::array<Complex, 2>& factor) const;

  DeviceSpec device_;
  std::vector<pulse::DriveSignal> drives_;
  Expansion expansion_;
  ModelBasis basis_;
  std::vector<double> indices_;  // peak modulation index per drive (signed)
  Operator static_;
  std::shared_ptr<const DriveTable> table_;
};

/// Laboratory-frame Hamiltonian restricted to the (0 +) 1 excitation sector,
/// expressed in a frame rotating at the reference frequency times N. The frame
/// change is exact because the lab Hamiltonian conserves N.
class LabFrameModel {
 public:
  LabFrameModel(const DeviceSpec& device, std::vector<pulse::DriveSignal> drives, bool with_ground = false);

  const ModelBasis& basis() const { return basis_; }
  Eigen::Index dimension() const { return basis_.dimension(); }
  void operator()(double t, Operator& out) const;

 private:
  std::vector<pulse::DriveSignal> drives_;
  ModelBasis basis_;
  Operator static_;
};

/// Eigenbasis of the undriven single-excitation lab Hamiltonian. Column k is
/// the dressed state paired with bare model state k (largest overlap, phase
/// chosen so the diagonal is real and positive).
Operator dressed_basis(const DeviceSpec& device, bool with_ground = false);

/// Effective coupling of the a_i^dag b_2 term produced by the modulation:
/// first = g J1(A / detuning) exp(-i(delta t + phi)), second = the J2 sideband.
/// `detuning_mhz` is omega_M2 - omega_Q.
struct EffectiveCoupling {
  Complex first;
  Complex second;
};
EffectiveCoupling effective_coupling(double g_mhz, double amplitude_mhz, double detuning_mhz, double delta_mhz,
                                     double phase_rad, double t_ns = 0.0);

/// Envelope average g^a of the resonant effective coupling for one qubit.
double envelope_average(const pulse::Envelope& envelope, const DeviceSpec& device, int qubit);

}  // namespace qlink::device
