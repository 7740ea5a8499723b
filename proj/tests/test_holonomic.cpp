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

#include "doctest.h"
#include "holonomic.hpp"

using namespace qlink;
using namespace qlink::holonomic;

namespace {

const pulse::Envelope kCosine = pulse::Envelope::cosine(1.0, 1.0);

}  // namespace

TEST_CASE("target unitary and coupling ratio") {
  const Operator swap = target_unitary(GateTarget::swap());
  CHECK(std::abs(swap(0, 0)) < 1e-15);
  CHECK(std::abs(swap(0, 1) + 1.0) < 1e-15);
  for (double theta : {0.3, 1.1}) {
    const Operator u = target_unitary(theta, 0.7);
    CHECK((u * u - Operator::Identity(2, 2)).norm() < 1e-14);
    CHECK((u - u.adjoint()).norm() < 1e-14);
  }
  CHECK(std::abs(coupling_ratio(GateTarget::sqrt_swap())) == doctest::Approx(0.41421).epsilon(1e-4));
  CHECK(std::abs(coupling_ratio(GateTarget::sqrt_swap()) - Complex(0.41421356, 0.0)) < 1e-6);
  CHECK_THROWS_AS(coupling_ratio(GateTarget::custom(std::numbers::pi, 0.0)), Error);
  CHECK(parse_gate_label("sqrt_swap") == GateLabel::kSqrtSwap);
  CHECK_THROWS_AS(parse_gate_label("cnot"), Error);
}

TEST_CASE("SWAP synthesis on the reference device") {
  const auto dev = device::paper_device();
  const auto s = synthesize_drives(dev, GateTarget::swap(), kCosine, {10.10, 10.10});
  CHECK(s.duration_ns == doctest::Approx(35.0).epsilon(0.2 / 35.0));
  CHECK(cyclic_area(s, dev) == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  CHECK(std::abs(implied_ratio(s, dev) - coupling_ratio(GateTarget::swap())) < 1e-3);
  const StateVector psi = run_from_10(dev, s);
  CHECK(std::norm(psi(1)) >= 0.99);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-9);

  const Operator block = subspace_block(dev, s);
  CHECK(std::norm(block(1, 0)) > 0.99);
  const Operator u = schedule_propagator(dev, s);
  CHECK((u.col(0) - psi).norm() < 1e-10);
  SimulationOptions fine;
  fine.dt_ns = 0.0025;
  CHECK(hilbert::unitarity_deviation(schedule_propagator(dev, s, fine)) < 1e-9);
}

TEST_CASE("sqrt(SWAP) synthesis") {
  const auto dev = device::paper_device();
  const auto s = synthesize_drives(dev, GateTarget::sqrt_swap(), kCosine, {4.16, 10.04});
  CHECK(s.duration_ns == doctest::Approx(46.0).epsilon(0.2 / 46.0));
  const StateVector psi = run_from_10(dev, s);
  CHECK(std::norm(psi(0)) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::norm(psi(1)) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("retune keeps modulation indices and the relative phase") {
  const auto dev = device::ladder_device(403.0);
  const auto s = synthesize_drives(dev, GateTarget::swap(), kCosine, {5.0, 5.0});
  const auto moved = device::with_qubit_frequencies(dev, 6.05, 5.61);
  const auto r = retune(s, moved);
  REQUIRE(r.peak_index.size() == 2);
  CHECK(r.peak_index[0] == doctest::Approx(s.peak_index[0]));
  CHECK(std::abs(implied_ratio(r, moved) / std::abs(implied_ratio(r, moved)) -
                 implied_ratio(s, dev) / std::abs(implied_ratio(s, dev))) < 1e-6);
}

TEST_CASE("dynamic baseline transfers the excitation") {
  const auto dev = device::paper_device();
  const auto h = synthesize_drives(dev, GateTarget::swap(), kCosine, {10.10, 10.10});
  const auto d = dynamic_baseline_schedule(dev, h);
  CHECK(d.drives.size() == 2);
  CHECK(d.drives[1].start_ns == doctest::Approx(d.drives[0].end_ns()));
  CHECK(d.duration_ns > h.duration_ns);
  CHECK(std::norm(run_from_10(dev, d)(1)) > 0.99);
}

TEST_CASE("detuning calibration recenters the transfer") {
  const auto dev = device::paper_device();
  const auto s = synthesize_drives(dev, GateTarget::swap(), kCosine, {10.10, 10.10});
  const double c = calibrate_detuning(dev, s);
  CHECK(std::abs(c) < 3.0);
  const double before = std::norm(run_from_10(dev, s)(1));
  const double after = std::norm(run_from_10(dev, offset_detuning(s, c))(1));
  CHECK(after >= before);
}

TEST_CASE("open-system run conserves trace and matches the closed limit") {
  const auto dev = device::paper_device();
  const auto s = synthesize_drives(dev, GateTarget::swap(), kCosine, {10.10, 10.10});
  const auto basis = model_basis(dev, true);
  StateVector psi0 = StateVector::Zero(basis.dimension());
  psi0(basis.qubit(0)) = 1.0;
  const DensityMatrix rho0 = psi0 * psi0.adjoint();
  const DensityMatrix lossless = run_open(dev, s, rho0, device::NoiseSpec{});
  CHECK(std::abs(lossless(basis.qubit(1), basis.qubit(1)).real() - std::norm(run_from_10(dev, s)(1))) < 1e-8);
  const DensityMatrix noisy = run_open(dev, s, rho0, device::default_noise());
  CHECK(std::abs(noisy.trace().real() - 1.0) < 1e-6);
  CHECK(noisy(0, 0).real() > 0.0);
}

TEST_CASE("lab frame in the dressed basis") {
  const auto dev = device::paper_device();
  const Operator d = device::dressed_basis(dev);
  CHECK(hilbert::unitarity_deviation(d) < 1e-10);
  for (Eigen::Index k = 0; k < d.rows(); ++k) CHECK(std::norm(d(k, k)) > 0.5);
  auto s = synthesize_drives(dev, GateTarget::swap(), kCosine, {10.10, 10.10});
  s.frame = Frame::kLab;
  SimulationOptions dressed;
  dressed.dressed = true;
  const StateVector psi = run_from_10(dev, s, dressed);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-8);
}
