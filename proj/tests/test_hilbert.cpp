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

#include "doctest.h"
#include "hilbert.hpp"

using namespace qlink;
using namespace qlink::hilbert;

namespace {

std::vector<double> uniform_grid(double end, int points) {
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) grid[k] = end * k / (points - 1);
  return grid;
}

// Two excitations hopping between two qubits and one mode with a slowly
// varying coupling; conserves excitation number.
Operator hopping(const HilbertSpace& space, double t) {
  const Operator a = space.annihilation(0);
  const Operator b = space.annihilation(1);
  const Operator c = space.annihilation(2);
  const double g1 = 0.2 * (1.0 + 0.3 * std::sin(0.7 * t));
  const double g2 = 0.15;
  Operator h = 0.4 * (a.adjoint() * a) - 0.3 * (b.adjoint() * b) + 0.05 * (c.adjoint() * c);
  h += g1 * (a.adjoint() * c + c.adjoint() * a) + g2 * (b.adjoint() * c + c.adjoint() * b);
  return h;
}

}  // namespace

TEST_CASE("compose_space dimensions and index maps") {
  CHECK(compose_space({2}).dimension() == 2);
  const auto space = compose_space({3, 3, 2, 2, 2, 2, 2});
  CHECK(space.dimension() == 288);
  for (Eigen::Index i = 0; i < space.dimension(); ++i) {
    const auto lv = space.levels(i);
    CHECK(space.index(lv) == i);
  }
  CHECK_THROWS_AS(compose_space({}), Error);
  CHECK_THROWS_AS(compose_space({2, 1}), Error);
}

TEST_CASE("embedding places an operator on one factor") {
  const auto space = compose_space({2, 2});
  Operator x(2, 2);
  x << 0, 1, 1, 0;
  const Operator full = space.embed(x, 0);
  Operator expected = Operator::Zero(4, 4);
  expected(0, 2) = expected(2, 0) = expected(1, 3) = expected(3, 1) = 1.0;
  CHECK((full - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("zero Hamiltonian gives identity") {
  const HamiltonianFn zero = [](double, Operator& h) { h.setZero(); };
  const Operator u = propagate_unitary(zero, 3, 12.5);
  CHECK((u - Operator::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("resonant Rabi transfer matches the analytic solution") {
  const double g = 0.3;
  const HamiltonianFn h = [g](double, Operator& out) {
    out.setZero();
    out(0, 1) = out(1, 0) = g;
  };
  const double t_end = std::numbers::pi / (2.0 * g);
  const Operator u = propagate_unitary(h, 2, t_end);
  CHECK(std::abs(u(1, 0) - Complex(0.0, -1.0)) < 1e-8);
  CHECK(std::abs(u(0, 0)) < 1e-8);
  CHECK(unitarity_deviation(u) < 1e-9);
  CHECK_THROWS_AS(propagate_unitary(h, 2, t_end, 0.0), Error);
}

TEST_CASE("non-finite samples are reported") {
  const HamiltonianFn bad = [](double t, Operator& out) {
    out.setZero();
    if (t > 1.0) out(0, 0) = std::nan("");
  };
  try {
    propagate_unitary(bad, 2, 2.0);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumerical);
  }
}

TEST_CASE("state propagation conserves norm and converges with step halving") {
  const auto space = compose_space({2, 2, 2});
  const HamiltonianFn h = [&](double t, Operator& out) { out = hopping(space, t); };
  StateVector psi0 = StateVector::Zero(8);
  psi0(space.index(std::vector<int>{1, 0, 0})) = 1.0;
  const auto grid = uniform_grid(40.0, 81);
  const auto coarse = propagate_state(h, psi0, grid, 0.01);
  const auto fine = propagate_state(h, psi0, grid, 0.005);
  for (const auto& row : coarse.populations) {
    double sum = 0.0;
    for (double p : row) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-8);
  }
  double diff = 0.0;
  for (std::size_t k = 0; k < fine.populations.back().size(); ++k) {
    diff = std::max(diff, std::abs(fine.populations.back()[k] - coarse.populations.back()[k]));
  }
  CHECK(diff < 1e-8);

  StateVector unnormalized = 2.0 * psi0;
  CHECK_THROWS_AS(propagate_state(h, unnormalized, grid), Error);
  const std::vector<double> bad_grid{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(propagate_state(h, psi0, bad_grid), Error);
}

TEST_CASE("sector restriction agrees with full propagation") {
  const auto space = compose_space({3, 3, 2});
  CHECK(excitation_sector(space, 0).dimension() == 1);
  CHECK(excitation_sector(compose_space({2, 2, 2, 2, 2, 2, 2}), 1).dimension() == 7);

  const HamiltonianFn full = [&](double t, Operator& out) { out = hopping(space, t); };
  const Sector sector = excitation_sector(space, 1);
  const HamiltonianFn restricted = [&](double t, Operator& out) {
    out = restrict_to_sector(hopping(space, t), space, 1);
  };
  StateVector psi0 = StateVector::Zero(space.dimension());
  psi0(space.index(std::vector<int>{1, 0, 0})) = 1.0;
  const auto grid = uniform_grid(25.0, 6);
  const auto a = propagate_state(full, psi0, grid);
  const auto b = propagate_state(restricted, restrict_state(psi0, sector), grid);
  const StateVector lifted = lift(*b.final_state, sector, space.dimension());
  CHECK((lifted - *a.final_state).norm() < 1e-8);

  // A diagonal drive on a transverse quadrature breaks conservation.
  const Operator a0 = space.annihilation(0);
  const Operator broken = hopping(space, 0.0) + 0.1 * (a0 + a0.adjoint());
  CHECK(excitation_commutator(broken, space) > 1e-3);
  CHECK_THROWS_AS(restrict_to_sector(broken, space, 1), Error);
}

TEST_CASE("Lindblad relaxation and closed-system limit") {
  const double t1 = 20.0e3;  // ns
  Operator lower = Operator::Zero(2, 2);
  lower(0, 1) = std::sqrt(1.0 / t1);
  const std::vector<Operator> collapse{lower};
  const HamiltonianFn zero = [](double, Operator& h) { h.setZero(); };
  DensityMatrix rho0 = DensityMatrix::Zero(2, 2);
  rho0(1, 1) = 1.0;
  const auto grid = uniform_grid(5000.0, 11);
  const auto traj = propagate_lindblad(zero, collapse, rho0, grid, 0.5);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(traj.populations[k][1] - std::exp(-grid[k] / t1)) < 1e-6);
    CHECK(std::abs(traj.populations[k][0] + traj.populations[k][1] - 1.0) < 1e-6);
  }

  const auto space = compose_space({2, 2, 2});
  const HamiltonianFn h = [&](double t, Operator& out) { out = hopping(space, t); };
  StateVector psi0 = StateVector::Zero(8);
  psi0(4) = 1.0;
  const auto short_grid = uniform_grid(10.0, 5);
  const auto closed = propagate_state(h, psi0, short_grid);
  const auto open = propagate_lindblad(h, {}, psi0 * psi0.adjoint(), short_grid);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(std::abs(closed.populations.back()[k] - open.populations.back()[k]) < 1e-7);
  }
  const std::vector<Operator> wrong{Operator::Zero(3, 3)};
  CHECK_THROWS_AS(propagate_lindblad(h, wrong, psi0 * psi0.adjoint(), short_grid), Error);
}
