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

#include "holonomic.hpp"

#include <algorithm>
#include <cmath>

#include "bessel.hpp"

namespace qlink::holonomic {
namespace {

using device::DeviceSpec;
using device::Expansion;

double wrap_phase(double p) {
  p = std::fmod(p, kTwoPi);
  return p < 0.0 ? p + kTwoPi : p;
}

constexpr std::size_t kMatchedKnots = 128;

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Target-mode coupling of qubit i.
double target_coupling(const DeviceSpec& d, int i) { return d.coupling_mhz[i][d.target_mode]; }

// Sign of g_i2 * J1(A / (omega_ref - omega_Q)) for a positive amplitude.
double coupling_sign(const DeviceSpec& d, int i) {
  return sign(target_coupling(d, i)) * sign(d.mode_qubit_detuning_mhz(i));
}

// Relative drive phase of Q1 that realizes phi given the coupling signs.
double holonomic_phase(const DeviceSpec& d, const GateTarget& target) {
  const double s = coupling_sign(d, 0) * coupling_sign(d, 1);
  return wrap_phase(-target.phi + (s > 0.0 ? std::numbers::pi : 0.0));
}

// Mean of |g_eff(u)| over the unit interval, MHz; both envelopes share the
// quadrature of the one with more breakpoints.
double mean_effective(const DeviceSpec& d, const pulse::Envelope& e1, double z1, const pulse::Envelope& e2,
                      double z2) {
  const auto q = pulse::unit_quadrature(e1.breakpoints().size() >= e2.breakpoints().size() ? e1 : e2);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double c1 = target_coupling(d, 0) * std::cyl_bessel_j(1.0, z1 * e1.shape(q.nodes[k]));
    const double c2 = target_coupling(d, 1) * std::cyl_bessel_j(1.0, z2 * e2.shape(q.nodes[k]));
    acc += q.weights[k] * std::hypot(c1, c2);
  }
  return acc;
}

// Flux profile for the weaker drive whose effective coupling is `scale` times
// the lead's at every instant: J1(x(u)) = scale * J1(z_lead * s(u)). Returned
// as an unpinned knot envelope of unit peak plus its peak index.
std::pair<pulse::Envelope, double> matched_envelope(const pulse::Envelope& lead, double z_lead, double scale) {
  const std::size_t segments = lead.breakpoints().size() - 1;
  const std::size_t per = (kMatchedKnots + segments - 1) / segments;
  const std::size_t count = segments * per + 1;
  std::vector<double> x(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(count - 1);
    const double target = scale * std::cyl_bessel_j(1.0, z_lead * lead.shape(u));
    x[k] = bessel::inverse_j1(std::min(bessel::kJ1MaximumValue, target));
  }
  const double peak = *std::max_element(x.begin(), x.end());
  if (peak <= 0.0) return {lead, 0.0};
  for (double& v : x) v /= peak;
  return {pulse::Envelope::parameterized(lead.duration(), 1.0, std::move(x), false), peak};
}

pulse::DriveSignal make_drive(const DeviceSpec& d, int qubit, const pulse::Envelope& shape, double duration,
                              double z, double detuning_mhz, double phase) {
  const double det = d.mode_qubit_detuning_mhz(qubit);
  require(det != 0.0, "qubit " + std::to_string(qubit + 1) + " is resonant with the target mode");
  pulse::DriveSignal drive;
  drive.qubit = qubit;
  drive.envelope = shape.with_duration(duration).with_peak(z * std::abs(det));
  drive.detuning_mhz = detuning_mhz;
  drive.modulation_mhz = -det + detuning_mhz;
  drive.phase_rad = phase;
  return drive;
}

StateVector basis_state(Eigen::Index dim, Eigen::Index k) {
  StateVector psi = StateVector::Zero(dim);
  psi(k) = 1.0;
  return psi;
}

hilbert::HamiltonianFn model_fn(const DeviceSpec& d, const GateSchedule& schedule, const SimulationOptions& options,
                                bool ground) {
  if (schedule.frame == Frame::kLab) {
    auto model = std::make_shared<device::LabFrameModel>(d, schedule.drives, ground);
    return [model](double t, Operator& h) { (*model)(t, h); };
  }
  auto model = std::make_shared<device::RotatingFrameModel>(d, schedule.drives, options.expansion, ground);
  return [model](double t, Operator& h) { (*model)(t, h); };
}

StateVector evolve(const DeviceSpec& d, const GateSchedule& schedule, const StateVector& psi0,
                   const SimulationOptions& options) {
  if (schedule.frame == Frame::kLab) {
    const std::vector<double> grid{0.0, schedule.duration_ns};
    const auto h = model_fn(d, schedule, options, false);
    if (!options.dressed) return *hilbert::propagate_state(h, psi0, grid, options.dt_ns).final_state;
    const Operator basis = device::dressed_basis(d);
    const StateVector out = *hilbert::propagate_state(h, basis * psi0, grid, options.dt_ns).final_state;
    return basis.adjoint() * out;
  }
  device::RotatingFrameModel model(d, schedule.drives, options.expansion);
  if (options.table_cache) {
    const int n = hilbert::step_count(schedule.duration_ns, options.dt_ns);
    model.use_table(schedule.duration_ns / n, schedule.duration_ns, *options.table_cache);
    // Only replace a stale table, so concurrent readers of a matching cache never race.
    if (model.table() != *options.table_cache) *options.table_cache = model.table();
  }
  return model.evolve(psi0, schedule.duration_ns, options.dt_ns);
}

}  // namespace

std::string_view to_string(GateLabel label) {
  switch (label) {
    case GateLabel::kSwap: return "SWAP";
    case GateLabel::kSqrtSwap: return "SQRT_SWAP";
    case GateLabel::kCustom: return "CUSTOM";
  }
  return "CUSTOM";
}

GateLabel parse_gate_label(std::string_view name) {
  if (name == "SWAP" || name == "swap") return GateLabel::kSwap;
  if (name == "SQRT_SWAP" || name == "sqrt_swap") return GateLabel::kSqrtSwap;
  if (name == "CUSTOM" || name == "custom") return GateLabel::kCustom;
  fail(ErrorCode::kInvalidArgument, "unknown gate label '" + std::string(name) + "'");
}

GateTarget GateTarget::swap() { return {std::numbers::pi / 2.0, std::numbers::pi, GateLabel::kSwap}; }

GateTarget GateTarget::sqrt_swap(double phi) { return {std::numbers::pi / 4.0, phi, GateLabel::kSqrtSwap}; }

GateTarget GateTarget::custom(double theta, double phi) { return {theta, phi, GateLabel::kCustom}; }

void GateTarget::validate() const {
  require(std::isfinite(theta) && theta >= 0.0 && theta <= std::numbers::pi, "theta must lie in [0, pi]");
  require(std::isfinite(phi) && phi >= 0.0 && phi < kTwoPi, "phi must lie in [0, 2 pi)");
  if (label == GateLabel::kSwap) require(std::abs(theta - std::numbers::pi / 2.0) < 1e-12, "SWAP needs theta = pi/2");
  if (label == GateLabel::kSqrtSwap) {
    require(std::abs(theta - std::numbers::pi / 4.0) < 1e-12, "SQRT_SWAP needs theta = pi/4");
  }
}

Operator target_unitary(double theta, double phi) {
  Operator u(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  u << c, std::polar(s, phi), std::polar(s, -phi), -c;
  return u;
}

Complex coupling_ratio(const GateTarget& target) {
  target.validate();
  require(std::abs(target.theta - std::numbers::pi) > 1e-9, "theta = pi has no finite coupling ratio");
  return -std::polar(std::tan(0.5 * target.theta), target.phi);
}

std::array<double, 2> target_averages(const GateTarget& target, double effective_average_mhz) {
  target.validate();
  require(std::isfinite(effective_average_mhz) && effective_average_mhz > 0.0,
          "effective coupling average must be positive");
  return {effective_average_mhz * std::sin(0.5 * target.theta), effective_average_mhz * std::cos(0.5 * target.theta)};
}

GateSchedule synthesize_drives(const DeviceSpec& device, const GateTarget& target, const pulse::Envelope& shape,
                               std::array<double, 2> averages_mhz, std::array<double, 2> detuning_mhz) {
  target.validate();
  for (double a : averages_mhz) require(std::isfinite(a) && a >= 0.0, "envelope averages must be non-negative");
  require(averages_mhz[0] > 0.0 || averages_mhz[1] > 0.0, "at least one envelope average must be positive");

  // The drive with the larger coupling fraction follows `shape`; the other
  // tracks it so the ratio of effective couplings is constant in time.
  std::array<double, 2> fraction{};
  for (int i = 0; i < 2; ++i) fraction[i] = averages_mhz[i] / std::abs(target_coupling(device, i));
  const int lead = fraction[0] >= fraction[1] ? 0 : 1;
  const int other = 1 - lead;
  std::array<double, 2> z{};
  std::array<pulse::Envelope, 2> shapes{shape, shape};
  z[lead] = pulse::index_for_mean(shape, fraction[lead]);
  if (fraction[other] > 0.0) {
    auto [env, peak] = matched_envelope(shape.with_duration(1.0), z[lead], fraction[other] / fraction[lead]);
    shapes[other] = env;
    z[other] = peak;
  }
  const double duration = 1e3 / (2.0 * mean_effective(device, shapes[0], z[0], shapes[1], z[1]));

  GateSchedule schedule;
  schedule.target = target;
  schedule.duration_ns = duration;
  schedule.drives.push_back(make_drive(device, 0, shapes[0], duration, z[0], detuning_mhz[0],
                                       holonomic_phase(device, target)));
  schedule.drives.push_back(make_drive(device, 1, shapes[1], duration, z[1], detuning_mhz[1], 0.0));
  schedule.peak_index = {z[0], z[1]};
  return schedule;
}

GateSchedule synthesize_drives(const DeviceSpec& device, const GateTarget& target, const pulse::Envelope& shape,
                               double effective_average_mhz) {
  return synthesize_drives(device, target, shape, target_averages(target, effective_average_mhz));
}

GateSchedule retune(const GateSchedule& schedule, const DeviceSpec& device) {
  require(schedule.peak_index.size() == schedule.drives.size(), "schedule lacks modulation indices");
  GateSchedule out = schedule;
  for (std::size_t k = 0; k < out.drives.size(); ++k) {
    auto& d = out.drives[k];
    const double old_det = d.detuning_mhz - d.modulation_mhz;
    auto fresh = make_drive(device, d.qubit, d.envelope, d.envelope.duration(), schedule.peak_index[k],
                            d.detuning_mhz, d.phase_rad);
    // Crossing the target mode flips the sign of J1; compensate in the phase.
    if (sign(old_det) != sign(device.mode_qubit_detuning_mhz(d.qubit))) {
      fresh.phase_rad = wrap_phase(fresh.phase_rad + std::numbers::pi);
    }
    fresh.start_ns = d.start_ns;
    d = fresh;
  }
  return out;
}

Complex implied_ratio(const GateSchedule& schedule, const DeviceSpec& device) {
  require(schedule.drives.size() >= 2, "implied ratio needs two drives");
  std::array<Complex, 2> c;
  for (int k = 0; k < 2; ++k) {
    const auto& d = schedule.drives[k];
    const double det = device.mode_qubit_detuning_mhz(d.qubit);
    const double mean = pulse::mean_j1(d.envelope, d.envelope.peak() / std::abs(det));
    c[k] = target_coupling(device, d.qubit) * sign(det) * mean * std::polar(1.0, -d.phase_rad);
  }
  require(std::abs(c[1]) > 0.0, "second drive has zero effective coupling");
  return c[0] / c[1];
}

double cyclic_area(const GateSchedule& schedule, const DeviceSpec& device) {
  require(schedule.drives.size() >= 2, "cyclic area needs two drives");
  std::array<double, 2> z{};
  for (int k = 0; k < 2; ++k) {
    const auto& d = schedule.drives[k];
    require(d.qubit == k, "cyclic area expects drives on Q1 then Q2");
    z[k] = d.envelope.peak() / std::abs(device.mode_qubit_detuning_mhz(d.qubit));
  }
  const auto& e = schedule.drives;
  return mhz_to_angular(mean_effective(device, e[0].envelope, z[0], e[1].envelope, z[1])) * schedule.duration_ns;
}

GateSchedule dynamic_baseline_schedule(const DeviceSpec& device, const GateSchedule& holonomic) {
  require(holonomic.drives.size() == 2 && holonomic.peak_index.size() == 2,
          "dynamic baseline needs a two-drive holonomic schedule");
  GateSchedule out;
  out.target = holonomic.target;
  out.frame = holonomic.frame;
  double start = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto& h = holonomic.drives[k];
    const double z = holonomic.peak_index[k];
    const double avg = std::abs(target_coupling(device, h.qubit)) * pulse::mean_j1(h.envelope, z);
    require(avg > 0.0, "dynamic baseline needs both drives to be active");
    // pi/2 transfer angle: 2 pi * avg * T = pi / 2.
    const double duration = 1e3 / (4.0 * avg);
    auto d = make_drive(device, h.qubit, h.envelope, duration, z, h.detuning_mhz, 0.0);
    d.start_ns = start;
    start += duration;
    out.drives.push_back(d);
    out.peak_index.push_back(z);
  }
  out.duration_ns = start;
  return out;
}

device::ModelBasis model_basis(const DeviceSpec& device, bool with_ground) { return {with_ground, device.modes()}; }

StateVector run_schedule(const DeviceSpec& device, const GateSchedule& schedule, const StateVector& psi0,
                         const SimulationOptions& options) {
  require(psi0.size() == model_basis(device).dimension(), "initial state does not match the model basis");
  return evolve(device, schedule, psi0, options);
}

StateVector run_from_10(const DeviceSpec& device, const GateSchedule& schedule, const SimulationOptions& options) {
  const auto basis = model_basis(device);
  return evolve(device, schedule, basis_state(basis.dimension(), basis.qubit(0)), options);
}

Operator subspace_block(const DeviceSpec& device, const GateSchedule& schedule, const SimulationOptions& options) {
  const auto basis = model_basis(device);
  Operator block(2, 2);
  for (int c = 0; c < 2; ++c) {
    const StateVector out = evolve(device, schedule, basis_state(basis.dimension(), basis.qubit(c)), options);
    block(0, c) = out(basis.qubit(0));
    block(1, c) = out(basis.qubit(1));
  }
  return block;
}

Operator schedule_propagator(const DeviceSpec& device, const GateSchedule& schedule,
                             const SimulationOptions& options) {
  const auto basis = model_basis(device);
  if (schedule.frame == Frame::kLab) {
    const Operator u = hilbert::propagate_unitary(model_fn(device, schedule, options, false), basis.dimension(),
                                                  schedule.duration_ns, options.dt_ns);
    if (!options.dressed) return u;
    const Operator dressed = device::dressed_basis(device);
    return dressed.adjoint() * u * dressed;
  }
  Operator u(basis.dimension(), basis.dimension());
  for (Eigen::Index c = 0; c < basis.dimension(); ++c) {
    u.col(c) = evolve(device, schedule, basis_state(basis.dimension(), c), options);
  }
  return u;
}

hilbert::Trajectory simulate(const DeviceSpec& device, const GateSchedule& schedule, const StateVector& psi0,
                             std::span<const double> grid, const std::optional<device::NoiseSpec>& noise,
                             const SimulationOptions& options) {
  const auto plain = model_basis(device);
  require(psi0.size() == plain.dimension(), "initial state does not match the model basis");
  if (!noise) return hilbert::propagate_state(model_fn(device, schedule, options, false), psi0, grid, options.dt_ns);
  const auto basis = model_basis(device, true);
  StateVector lifted = StateVector::Zero(basis.dimension());
  lifted.tail(plain.dimension()) = psi0;
  const auto collapse = device::collapse_operators(device, *noise, basis);
  return hilbert::propagate_lindblad(model_fn(device, schedule, options, true), collapse,
                                     lifted * lifted.adjoint(), grid, options.dt_ns);
}

DensityMatrix run_open(const DeviceSpec& device, const GateSchedule& schedule, const DensityMatrix& rho0,
                       const device::NoiseSpec& noise, const SimulationOptions& options) {
  const auto basis = model_basis(device, true);
  require(rho0.rows() == basis.dimension(), "density matrix does not match the model basis with ground");
  const auto collapse = device::collapse_operators(device, noise, basis);
  const std::vector<double> grid{0.0, schedule.duration_ns};
  return *hilbert::propagate_lindblad(model_fn(device, schedule, options, true), collapse, rho0, grid, options.dt_ns)
              .final_density;
}

GateSchedule offset_detuning(const GateSchedule& schedule, double offset_mhz) {
  GateSchedule out = schedule;
  for (auto& d : out.drives) {
    d.modulation_mhz += offset_mhz;
    d.detuning_mhz += offset_mhz;
  }
  return out;
}

double calibrate_detuning(const DeviceSpec& device, const GateSchedule& schedule, const SimulationOptions& options,
                          double span_mhz) {
  require(span_mhz > 0.0, "calibration span must be positive");
  const Operator v = target_unitary(schedule.target);
  const auto basis = model_basis(device);
  SimulationOptions local = options;
  local.table_cache = nullptr;
  const auto loss = [&](double c) {
    const StateVector psi = run_from_10(device, offset_detuning(schedule, c), local);
    return 1.0 - std::norm(std::conj(v(0, 0)) * psi(basis.qubit(0)) + std::conj(v(1, 0)) * psi(basis.qubit(1)));
  };
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -span_mhz, b = span_mhz;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = loss(x1), f2 = loss(x2);
  while (b - a > 1e-3) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = loss(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = loss(x2);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> uniform_grid(double duration, int points) {
  require(points >= 2 && duration > 0.0, "grid needs at least two points over a positive duration");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[k] = duration * k / (points - 1);
  grid.back() = duration;
  return grid;
}

}  // namespace qlink::holonomic
