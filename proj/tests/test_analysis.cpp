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

#include <cmath>

#include "analysis.hpp"
#include "doctest.h"

using namespace qlink;
using namespace qlink::analysis;

namespace {

DensityMatrix pure(const StateVector& psi) { return psi * psi.adjoint(); }

}  // namespace

TEST_CASE("state fidelity") {
  StateVector zero(2), plus(2);
  zero << 1.0, 0.0;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(state_fidelity(pure(zero), pure(zero)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(state_fidelity(pure(zero), pure(plus)) == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(state_fidelity(zero, plus) == doctest::Approx(0.70711).epsilon(1e-5));
  DensityMatrix mixed = DensityMatrix::Identity(2, 2) * 0.5;
  mixed(0, 1) = 0.1;
  mixed(1, 0) = 0.1;
  CHECK(state_fidelity(mixed, pure(plus)) == doctest::Approx(state_fidelity(pure(plus), mixed)).epsilon(1e-10));
  DensityMatrix bad = DensityMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(state_fidelity(bad, mixed), Error);
  CHECK_THROWS_AS(state_fidelity(mixed, DensityMatrix::Identity(3, 3)), Error);
}

TEST_CASE("gate loss") {
  const Operator id = Operator::Identity(2, 2);
  Operator x(2, 2), s(2, 2);
  x << 0, 1, 1, 0;
  s << 1, 0, 0, Complex(0, 1);
  CHECK(gate_loss(id, id) == doctest::Approx(0.0));
  CHECK(gate_loss(x, id) == doctest::Approx(1.0));
  CHECK(gate_loss(id, s) == doctest::Approx(0.5));
  CHECK(gate_loss(x, std::exp(Complex(0, 1.3)) * x) < 1e-12);
  CHECK_THROWS_AS(gate_loss(id, Operator::Identity(3, 3)), Error);
}

TEST_CASE("leakage and subspace extraction") {
  const device::ModelBasis basis{false, 3};
  StateVector psi = StateVector::Zero(5);
  psi(0) = std::sqrt(0.5);
  psi(1) = std::sqrt(0.3);
  psi(3) = std::sqrt(0.2);
  CHECK(leakage(psi, basis) == doctest::Approx(0.2));
  const auto sub = subspace_state(psi, basis);
  CHECK(sub.discarded == doctest::Approx(0.2));
  CHECK(sub.rho(0, 0).real() == doctest::Approx(0.625));
  CHECK(leakage(psi, basis) + sub.discarded * 0.0 + sub.rho.trace().real() * 0.8 == doctest::Approx(1.0));

  StateVector bell = StateVector::Zero(5);
  bell(0) = bell(1) = 1.0 / std::sqrt(2.0);
  const auto b = subspace_state(bell, basis);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(b.rho(r, c).real() == doctest::Approx(0.5));
  StateVector mode_only = StateVector::Zero(5);
  mode_only(4) = 1.0;
  CHECK_THROWS_AS(subspace_state(mode_only, basis), Error);

  // Full space: qubit level 2 counts as leakage.
  const auto space = hilbert::compose_space({3, 3, 2});
  StateVector full = StateVector::Zero(space.dimension());
  full(space.index(std::vector<int>{1, 0, 0})) = std::sqrt(0.9);
  full(space.index(std::vector<int>{2, 0, 0})) = std::sqrt(0.06);
  full(space.index(std::vector<int>{0, 0, 1})) = std::sqrt(0.04);
  CHECK(leakage(full, space) == doctest::Approx(0.1));
}

TEST_CASE("linear error fits") {
  const auto fit = repeated_gate_error([](int n) { return 1.0 - 0.0184 * n; }, 20);
  CHECK(std::abs(fit.epsilon - 0.0184) < 1e-12);
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.counts.size() == 20);
  const auto truncated = repeated_gate_error([](int n) { return 1.0 - 0.2 * n; }, 10);
  CHECK(truncated.counts.size() == 4);
  try {
    repeated_gate_error([](int n) { return 1.0 - 0.45 * n; }, 10);
    FAIL("expected an unreliable fit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFitUnreliable);
  }
  CHECK_THROWS_AS(repeated_gate_error([](int) { return 1.0; }, 2), Error);
  CHECK(repeated_gate_error([](int n) { return 0.9 + 0.001 * n; }, 5).epsilon == 0.0);
}

TEST_CASE("repeated SWAP error on the simulator") {
  const auto dev = device::paper_device();
  const auto cosine = pulse::Envelope::cosine(1.0, 1.0);
  auto s = holonomic::synthesize_drives(dev, holonomic::GateTarget::swap(), cosine, {10.10, 10.10});
  s = holonomic::offset_detuning(s, holonomic::calibrate_detuning(dev, s));
  const auto closed = decoherence_compensated_error(dev, s, 10, std::nullopt);
  CHECK(closed.coherent == closed.total.epsilon);
  CHECK(closed.total.epsilon < 2e-3);

  const auto noisy = decoherence_compensated_error(dev, s, 6, device::default_noise());
  CHECK(noisy.total.epsilon > closed.total.epsilon);
  CHECK(noisy.dissipation.epsilon > 0.0);
  CHECK(noisy.coherent < noisy.total.epsilon);

  // Longer gates at the same noise lose more per gate.
  const auto slow = holonomic::synthesize_drives(dev, holonomic::GateTarget::swap(), cosine, {5.0, 5.0});
  const auto noise = device::default_noise();
  CHECK(decoherence_compensated_error(dev, slow, 6, noise).dissipation.epsilon > noisy.dissipation.epsilon);
}

TEST_CASE("robustness sweep") {
  const auto dev = device::paper_device();
  const auto cosine = pulse::Envelope::cosine(1.0, 1.0);
  auto h = holonomic::synthesize_drives(dev, holonomic::GateTarget::swap(), cosine, {10.10, 10.10});
  auto d = holonomic::dynamic_baseline_schedule(dev, h);
  h = holonomic::offset_detuning(h, holonomic::calibrate_detuning(dev, h));
  d = holonomic::offset_detuning(d, holonomic::calibrate_detuning(dev, d));
  const std::vector<double> grid{-3.0, 0.0, 3.0};
  const auto curve = robustness_sweep(dev, h, d, grid, std::nullopt, {}, 2);
  CHECK(std::abs(curve.loss_holonomic[0] - curve.loss_holonomic[2]) < 1e-2);
  CHECK(curve.loss_holonomic[1] < curve.loss_holonomic[2]);
  CHECK(curve.reference_holonomic == doctest::Approx(curve.loss_holonomic[2]));
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(curve.loss_holonomic[k] <= curve.loss_dynamic[k]);
  CHECK(curve.relative_improvement > 0.25);
  const std::vector<double> wide{-12.0};
  CHECK_THROWS_AS(robustness_sweep(dev, h, d, wide), Error);
}
