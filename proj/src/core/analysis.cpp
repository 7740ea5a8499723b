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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace qlink::analysis {

namespace {

constexpr double kPsdTolerance = 1e-10;

// Hermitian square root with eigenvalues clipped at zero.
Operator psd_sqrt(const DensityMatrix& m, const char* name) {
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd w = es.eigenvalues();
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) < -kPsdTolerance) fail(ErrorCode::kInvalidArgument, std::string(name) + " is not positive semidefinite");
    w(k) = std::sqrt(std::max(0.0, w(k)));
  }
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double clip_unit(double x) { return std::clamp(x, 0.0, 1.0); }

StateVector ideal_state(const Operator& v, int n) {
  StateVector s(2);
  s << 1.0, 0.0;
  for (int k = 0; k < n; ++k) s = v * s;
  return s;
}

// Overlap of a model-basis state or density matrix with a subspace state.
double overlap(const StateVector& psi, const device::ModelBasis& basis, const StateVector& ideal) {
  const Complex a = std::conj(ideal(0)) * psi(basis.qubit(0)) + std::conj(ideal(1)) * psi(basis.qubit(1));
  return std::norm(a);
}

double overlap(const DensityMatrix& rho, const device::ModelBasis& basis, const StateVector& ideal) {
  Complex sum = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) sum += std::conj(ideal(r)) * rho(basis.qubit(r), basis.qubit(c)) * ideal(c);
  }
  return sum.real();
}

// Applies the ideal 2x2 gate on the qubit block of a density matrix.
DensityMatrix apply_ideal(const DensityMatrix& rho, const device::ModelBasis& basis, const Operator& v) {
  Operator full = Operator::Identity(basis.dimension(), basis.dimension());
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) full(basis.qubit(r), basis.qubit(c)) = v(r, c);
  }
  return full * rho * full.adjoint();
}

StateVector initial_10(const device::ModelBasis& basis) {
  StateVector psi = StateVector::Zero(basis.dimension());
  psi(basis.qubit(0)) = 1.0;
  return psi;
}

}  // namespace

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.rows() == sigma.rows() && rho.cols() == sigma.cols() && rho.rows() == rho.cols(),
          "fidelity needs square matrices of equal dimension");
  const Operator s = psd_sqrt(rho, "first state");
  psd_sqrt(sigma, "second state");
  const Operator inner = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (inner + inner.adjoint()));
  double f = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) f += std::sqrt(std::max(0.0, es.eigenvalues()(k)));
  return clip_unit(f);
}

double state_fidelity(const StateVector& a, const StateVector& b) {
  require(a.size() == b.size(), "fidelity needs states of equal dimension");
  return clip_unit(std::abs(a.dot(b)));
}

double gate_loss(const Operator& ideal, const Operator& actual) {
  require(ideal.rows() == actual.rows() && ideal.cols() == actual.cols() && ideal.rows() == ideal.cols(),
          "gate loss needs square operators of equal dimension");
  const double d = static_cast<double>(ideal.rows());
  const double overlap = std::abs((ideal.adjoint() * actual).trace()) / d;
  return clip_unit(1.0 - overlap * overlap);
}

double leakage(const StateVector& psi, const device::ModelBasis& basis) {
  require(psi.size() == basis.dimension(), "state does not match the model basis");
  double sum = 0.0;
  for (std::size_t j = 0; j < basis.modes; ++j) sum += std::norm(psi(basis.mode(j)));
  return sum;
}

double leakage(const DensityMatrix& rho, const device::ModelBasis& basis) {
  require(rho.rows() == basis.dimension(), "density matrix does not match the model basis");
  double sum = 0.0;
  for (std::size_t j = 0; j < basis.modes; ++j) sum += rho(basis.mode(j), basis.mode(j)).real();
  return sum;
}

double leakage(const StateVector& psi, const hilbert::HilbertSpace& space, std::size_t qubits) {
  require(psi.size() == space.dimension(), "state does not match the Hilbert space");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < space.dimension(); ++i) {
    const auto lv = space.levels(i);
    bool outside = false;
    for (std::size_t f = 0; f < lv.size(); ++f) outside |= f < qubits ? lv[f] >= 2 : lv[f] >= 1;
    if (outside) sum += std::norm(psi(i));
  }
  return sum;
}

std::vector<double> mode_populations(const StateVector& psi, const device::ModelBasis& basis) {
  require(psi.size() == basis.dimension(), "state does not match the model basis");
  std::vector<double> out(basis.modes);
  for (std::size_t j = 0; j < basis.modes; ++j) out[j] = std::norm(psi(basis.mode(j)));
  return out;
}

SubspaceState subspace_state(const StateVector& psi, const device::ModelBasis& basis) {
  require(psi.size() == basis.dimension(), "state does not match the model basis");
  return subspace_state(DensityMatrix(psi * psi.adjoint()), basis);
}

SubspaceState subspace_state(const DensityMatrix& rho, const device::ModelBasis& basis) {
  require(rho.rows() == basis.dimension(), "density matrix does not match the model basis");
  DensityMatrix block(2, 2);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) block(r, c) = rho(basis.qubit(r), basis.qubit(c));
  }
  const double weight = block.trace().real();
  if (weight < 1e-12) fail(ErrorCode::kNumerical, "subspace weight too small to renormalize");
  return {block / weight, rho.trace().real() - weight};
}

ErrorFit fit_linear_error(std::span<const int> counts, std::span<const double> populations) {
  require(counts.size() == populations.size(), "counts and populations differ in length");
  if (counts.size() < 3) fail(ErrorCode::kFitUnreliable, "linear error fit needs at least 3 points");
  const double n = static_cast<double>(counts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double x = counts[k];
    sx += x;
    sy += populations[k];
    sxx += x * x;
    sxy += x * populations[k];
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, "gate counts must not all be equal");
  ErrorFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.epsilon = clip_unit(-fit.slope);
  double ss = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double r = populations[k] - (fit.intercept + fit.slope * counts[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.counts.assign(counts.begin(), counts.end());
  fit.populations.assign(populations.begin(), populations.end());
  return fit;
}

ErrorFit repeated_gate_error(const std::function<double(int)>& population, int n_max) {
  require(n_max >= 3, "repeated-gate error needs n_max >= 3");
  std::vector<int> counts;
  std::vector<double> pops;
  for (int n = 1; n <= n_max; ++n) {
    const double p = population(n);
    if (!std::isfinite(p)) fail(ErrorCode::kNumerical, "non-finite population at n = " + std::to_string(n));
    if (p < 0.1) break;
    counts.push_back(n);
    pops.push_back(p);
  }
  if (counts.size() < 3) {
    fail(ErrorCode::kFitUnreliable, "population fell below 0.1 after " + std::to_string(counts.size()) + " gates");
  }
  return fit_linear_error(counts, pops);
}

ErrorFit repeated_gate_error(const device::DeviceSpec& device, const holonomic::GateSchedule& schedule, int n_max,
                             const std::optional<device::NoiseSpec>& noise,
                             const holonomic::SimulationOptions& options) {
  require(n_max >= 3, "repeated-gate error needs n_max >= 3");
  const Operator v = holonomic::target_unitary(schedule.target);
  std::vector<double> pops;
  if (!noise || noise->lossless()) {
    const auto basis = holonomic::model_basis(device);
    const Operator u = holonomic::schedule_propagator(device, schedule, options);
    StateVector psi = initial_10(basis);
    for (int n = 1; n <= n_max; ++n) {
      psi = u * psi;
      pops.push_back(overlap(psi, basis, ideal_state(v, n)));
    }
  } else {
    const auto basis = holonomic::model_basis(device, true);
    const StateVector psi0 = initial_10(basis);
    DensityMatrix rho = psi0 * psi0.adjoint();
    for (int n = 1; n <= n_max; ++n) {
      rho = holonomic::run_open(device, schedule, rho, *noise, options);
      pops.push_back(overlap(rho, basis, ideal_state(v, n)));
    }
  }
  return repeated_gate_error([&](int n) { return pops[static_cast<std::size_t>(n - 1)]; }, n_max);
}

CompensatedError decoherence_compensated_error(const device::DeviceSpec& device,
                                               const holonomic::GateSchedule& schedule, int n_max,
                                               const std::optional<device::NoiseSpec>& noise,
                                               const holonomic::SimulationOptions& options) {
  CompensatedError out;
  out.total = repeated_gate_error(device, schedule, n_max, noise, options);
  if (!noise || noise->lossless()) {
    out.dissipation.counts = out.total.counts;
    out.dissipation.populations.assign(out.total.counts.size(), 1.0);
    out.dissipation.intercept = 1.0;
    out.coherent = out.total.epsilon;
    return out;
  }
  const auto basis = holonomic::model_basis(device, true);
  const auto collapse = device::collapse_operators(device, *noise, basis);
  const Operator v = holonomic::target_unitary(schedule.target);
  const hilbert::HamiltonianFn idle = [](double, Operator& h) { h.setZero(); };
  const std::vector<double> grid{0.0, schedule.duration_ns};
  const StateVector psi0 = initial_10(basis);
  DensityMatrix rho = psi0 * psi0.adjoint();
  std::vector<double> pops;
  for (int n = 1; n <= n_max; ++n) {
    rho = *hilbert::propagate_lindblad(idle, collapse, rho, grid, options.dt_ns).final_density;
    rho = apply_ideal(rho, basis, v);
    pops.push_back(overlap(rho, basis, ideal_state(v, n)));
  }
  out.dissipation = repeated_gate_error([&](int n) { return pops[static_cast<std::size_t>(n - 1)]; }, n_max);
  out.coherent = out.total.epsilon - out.dissipation.epsilon;
  return out;
}

RobustnessCurve robustness_sweep(const device::DeviceSpec& device, const holonomic::GateSchedule& holonomic,
                                 const holonomic::GateSchedule& dynamic, std::span<const double> detuning_mhz,
                                 const std::optional<device::NoiseSpec>& noise,
                                 const holonomic::SimulationOptions& options, int workers, double reference_mhz) {
  require(!detuning_mhz.empty(), "robustness sweep needs a detuning grid");
  for (double d : detuning_mhz) require(std::abs(d) <= 10.0, "robustness detunings must lie within +-10 MHz");
  const bool open = noise && !noise->lossless();
  holonomic::SimulationOptions local = options;
  local.table_cache = nullptr;

  const auto loss = [&](const holonomic::GateSchedule& s, double shift) {
    const auto shifted = device::with_target_shift(device, shift);
    double p01 = 0.0;
    if (open) {
      const auto basis = holonomic::model_basis(device, true);
      const StateVector psi0 = initial_10(basis);
      const DensityMatrix rho = holonomic::run_open(shifted, s, psi0 * psi0.adjoint(), *noise, local);
      p01 = rho(basis.qubit(1), basis.qubit(1)).real();
    } else {
      const StateVector psi = holonomic::run_from_10(shifted, s, local);
      p01 = std::norm(psi(holonomic::model_basis(device).qubit(1)));
    }
    return clip_unit(1.0 - p01);
  };

  RobustnessCurve curve;
  curve.detuning_mhz.assign(detuning_mhz.begin(), detuning_mhz.end());
  const std::size_t n = detuning_mhz.size();
  curve.loss_holonomic.resize(n + 1);
  curve.loss_dynamic.resize(n + 1);
  parallel_for(2 * (n + 1), workers, [&](std::size_t k) {
    const std::size_t i = k / 2;
    const double shift = i < n ? detuning_mhz[i] : reference_mhz;
    if (k % 2 == 0) {
      curve.loss_holonomic[i] = loss(holonomic, shift);
    } else {
      curve.loss_dynamic[i] = loss(dynamic, shift);
    }
  });
  curve.reference_mhz = reference_mhz;
  curve.reference_holonomic = curve.loss_holonomic.back();
  curve.reference_dynamic = curve.loss_dynamic.back();
  curve.loss_holonomic.pop_back();
  curve.loss_dynamic.pop_back();
  curve.relative_improvement = curve.reference_dynamic > 0.0
                                   ? (curve.reference_dynamic - curve.reference_holonomic) / curve.reference_dynamic
                                   : 0.0;
  return curve;
}

}  // namespace qlink::analysis
