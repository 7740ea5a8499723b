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
#include <vector>

#include "bessel.hpp"
#include "device.hpp"
#include "doctest.h"

using namespace qlink;
using namespace qlink::device;

namespace {

std::vector<pulse::DriveSignal> cosine_drives(const DeviceSpec& d, double duration) {
  std::vector<pulse::DriveSignal> drives(2);
  for (int i = 0; i < 2; ++i) {
    drives[i].qubit = i;
    drives[i].envelope = pulse::Envelope::cosine(duration, 0.4 * std::abs(d.mode_qubit_detuning_mhz(i)));
    drives[i].modulation_mhz = -d.mode_qubit_detuning_mhz(i);
  }
  drives[0].phase_rad = std::numbers::pi;
  return drives;
}

}  // namespace

TEST_CASE("device construction") {
  const auto paper = paper_device();
  CHECK(paper.modes() == 3);
  CHECK(paper.mode_label(paper.target_mode) == "M2");
  CHECK(paper.coupling_mhz[1][paper.target_mode] == doctest::Approx(26.88));
  CHECK(paper.coupling_mhz[1][0] == doctest::Approx(-26.88));
  CHECK(paper.coupling_mhz[0][0] == doctest::Approx(30.26));

  const auto ladder = ladder_device(403.0);
  CHECK(ladder.modes() == 5);
  CHECK(ladder.mode_label(0) == "M0");
  CHECK(ladder.mode_freq_ghz[1] == doctest::Approx(6.233));
  CHECK(ladder.mode_freq_ghz[3] == doctest::Approx(5.427));
  CHECK(ladder.coupling_mhz[1][1] < 0.0);
  CHECK(ladder.coupling_mhz[1][0] > 0.0);
  CHECK(ladder_device(403.0, 1).modes() == 1);

  RawDevice both;
  both.mode_freqs_ghz = {5.83};
  both.center_mode_ghz = 5.83;
  both.fsr_mhz = 400.0;
  CHECK_THROWS_AS(build_device(both), Error);
  RawDevice bad_fsr;
  bad_fsr.center_mode_ghz = 5.83;
  bad_fsr.fsr_mhz = -1.0;
  CHECK_THROWS_AS(build_device(bad_fsr), Error);
  RawDevice conflict;
  conflict.center_mode_ghz = 5.83;
  conflict.fsr_mhz = 403.0;
  conflict.length_m = 0.20;
  CHECK_THROWS_AS(build_device(conflict), Error);
  conflict.length_m = 0.15;
  CHECK_NOTHROW(build_device(conflict));
  RawDevice insane;
  insane.mode_freqs_ghz = {5.83};
  insane.qubit_freq_ghz = {25.0, 5.7};
  CHECK_THROWS_AS(build_device(insane), Error);
}

TEST_CASE("cable length and FSR") {
  CHECK(fsr_from_length(0.15) == doctest::Approx(403.0).epsilon(1e-3));
  CHECK(length_from_fsr(100.0) == doctest::Approx(0.6).epsilon(1e-2));
  CHECK(fsr_from_length(0.3) == doctest::Approx(0.5 * fsr_from_length(0.15)));
  CHECK_THROWS_AS(fsr_from_length(0.0), Error);
  CHECK_THROWS_AS(length_from_fsr(-3.0), Error);
}

TEST_CASE("lab-frame Hamiltonian") {
  const auto dev = paper_device();
  const auto space = device_space(dev);
  CHECK(space.dimension() == 3 * 3 * 8);
  const Operator h0 = lab_frame_hamiltonian(dev, {}, 3.0);
  CHECK(hilbert::hermiticity_deviation(h0) < 1e-12);
  CHECK(hilbert::excitation_commutator(h0, space) < 1e-12);
  CHECK((h0 - lab_frame_hamiltonian(dev, {}, 17.0)).norm() == 0.0);

  // Driven diagonal entries oscillate at the modulation frequency.
  pulse::DriveSignal d;
  d.qubit = 0;
  d.envelope = pulse::Envelope::square(100.0, 50.0);
  d.modulation_mhz = 297.0;
  const std::vector<pulse::DriveSignal> drives{d};
  const Eigen::Index q1 = space.index(std::vector<int>{1, 0, 0, 0, 0});
  for (double t : {0.0, 1.3, 2.9}) {
    const Operator h = lab_frame_hamiltonian(dev, drives, t);
    CHECK(hilbert::hermiticity_deviation(h) < 1e-12);
    const double expected = mhz_to_angular(50.0) * std::cos(mhz_to_angular(297.0) * t);
    CHECK(std::abs((h - h0)(q1, q1).real() - expected) < 1e-12);
  }

  // Hybridized single-excitation energies from the dense eigensolver sit
  // close to the bare frequencies (dispersive regime).
  const Operator sector = hilbert::restrict_to_sector(h0, space, 1);
  Eigen::SelfAdjointEigenSolver<Operator> es(sector);
  const double q1_bare = ghz_to_angular(dev.qubit_freq_ghz[0]);
  double nearest = 1e9;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    nearest = std::min(nearest, std::abs(es.eigenvalues()(k) - q1_bare));
  }
  CHECK(nearest > 0.0);
  CHECK(angular_to_mhz(nearest) < 10.0);
}

TEST_CASE("lab sector model matches the full-space Hamiltonian") {
  const auto dev = paper_device();
  const auto space = device_space(dev);
  const auto drives = cosine_drives(dev, 30.0);
  LabFrameModel model(dev, drives);
  const double ref = ghz_to_angular(dev.frame_reference_ghz);
  for (double t : {0.0, 7.7, 15.0}) {
    const Operator full = hilbert::restrict_to_sector(lab_frame_hamiltonian(dev, drives, t), space, 1);
    Operator m(model.dimension(), model.dimension());
    model(t, m);
    // Sector order is (modes reversed, Q2, Q1); the model is (Q1, Q2, modes).
    const Eigen::Index n = m.rows();
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        Complex expected = full(n - 1 - r, n - 1 - c);
        if (r == c) expected -= ref;
        CHECK(std::abs(m(r, c) - expected) < 1e-9);
      }
    }
  }
}

TEST_CASE("rotating-frame Hamiltonian") {
  const auto dev = ladder_device(403.0);
  const Operator h0 = rotating_frame_hamiltonian(dev, {}, 4.0, Expansion::kJacobiAnger);
  CHECK(h0.rows() == 7);
  for (std::size_t j = 0; j < 5; ++j) {
    const double expected = -(static_cast<double>(j) - 2.0) * mhz_to_angular(403.0);
    CHECK(h0(2 + j, 2 + j).real() == doctest::Approx(expected));
  }
  CHECK(h0.block(0, 2, 2, 5).norm() == 0.0);  // J1(0) = 0, no drive

  const auto drives = cosine_drives(dev, 40.0);
  for (auto expansion : {Expansion::kJacobiAnger, Expansion::kExact}) {
    for (double t : {3.0, 20.0, 39.0}) {
      CHECK(hilbert::hermiticity_deviation(rotating_frame_hamiltonian(dev, drives, t, expansion)) < 1e-12);
    }
  }

  // Zero drive, exact expansion: couplings carry the bare qubit phase only.
  const auto resonant = with_qubit_frequencies(dev, 5.83, 5.5);
  const Operator e = rotating_frame_hamiltonian(resonant, {}, 9.0, Expansion::kExact);
  CHECK(std::abs(e(2 + 2, 0) - Complex(mhz_to_angular(30.26), 0.0)) < 1e-12);
}

TEST_CASE("structured evolution matches generic propagation") {
  const auto dev = ladder_device(403.0);
  const auto drives = cosine_drives(dev, 40.0);
  for (auto expansion : {Expansion::kJacobiAnger, Expansion::kExact}) {
    RotatingFrameModel model(dev, drives, expansion);
    StateVector psi0 = StateVector::Zero(model.dimension());
    psi0(0) = 1.0;
    const StateVector fast = model.evolve(psi0, 40.0);
    RotatingFrameModel plain(dev, drives, expansion);
    const std::vector<double> grid{0.0, 40.0};
    const auto traj = hilbert::propagate_state(
        [&](double t, Operator& h) { plain(t, h); }, psi0, grid);
    CHECK((fast - *traj.final_state).norm() < 1e-10);
  }
}

TEST_CASE("flipping all g2 signs leaves populations unchanged") {
  const auto dev = ladder_device(403.0);
  auto flipped = dev;
  for (double& g : flipped.coupling_mhz[1]) g = -g;
  const auto drives = cosine_drives(dev, 40.0);
  RotatingFrameModel a(dev, drives);
  RotatingFrameModel b(flipped, drives);
  StateVector psi0 = StateVector::Zero(7);
  psi0(0) = 1.0;
  const StateVector pa = a.evolve(psi0, 40.0);
  const StateVector pb = b.evolve(psi0, 40.0);
  for (Eigen::Index k = 0; k < 7; ++k) CHECK(std::norm(pa(k)) == doctest::Approx(std::norm(pb(k))).epsilon(1e-10));
}

TEST_CASE("effective coupling") {
  CHECK(std::abs(effective_coupling(30.0, 0.0, 200.0, 0.0, 0.0).first) == 0.0);
  const auto c = effective_coupling(1.0, 25.0, 250.0, 0.0, 0.0);
  CHECK(std::abs(c.first) == doctest::Approx(0.049938).epsilon(1e-5));
  CHECK(std::abs(c.second) == doctest::Approx(bessel::j(2, 0.1)));
  const auto p = effective_coupling(1.0, 25.0, 250.0, 2.0, 0.5, 10.0);
  CHECK(std::arg(p.first) == doctest::Approx(-(mhz_to_angular(2.0) * 10.0 + 0.5)));
  CHECK_THROWS_AS(effective_coupling(1.0, 25.0, 0.0, 0.0, 0.0), Error);

  const auto dev = paper_device();
  const auto square = pulse::Envelope::square(35.0, 30.0);
  CHECK(envelope_average(square, dev, 1) ==
        doctest::Approx(26.88 * bessel::j(1, 30.0 / 118.0)).epsilon(1e-10));
}

TEST_CASE("collapse operators") {
  const auto dev = paper_device();
  ModelBasis basis{true, dev.modes()};
  NoiseSpec noise;
  noise.qubit_t1_us = {20.0, std::nullopt};
  noise.mode_tphi_us = 5.0;
  const auto ops = collapse_operators(dev, noise, basis);
  CHECK(ops.size() == 1 + dev.modes());
  CHECK(ops[0](0, basis.qubit(0)).real() == doctest::Approx(std::sqrt(1.0 / 20.0e3)));
  NoiseSpec negative;
  negative.mode_t1_us = -1.0;
  CHECK_THROWS_AS(negative.validate(), Error);
  CHECK(NoiseSpec{}.lossless());
  CHECK_THROWS_AS(collapse_operators(dev, noise, ModelBasis{false, dev.modes()}), Error);
}
