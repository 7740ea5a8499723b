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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace qlink::hilbert {

inline constexpr double kDefaultStep = 0.005;  // ns

/// Tensor-product space of truncated oscillators. Subsystem 0 is the most
/// significant digit of the flat basis index.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims, std::vector<std::string> labels = {});

  Eigen::Index dimension() const { return dimension_; }
  std::size_t subsystems() const { return dims_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::vector<int> levels(Eigen::Index index) const;
  Eigen::Index index(std::span<const int> levels) const;

  /// Total excitation number sum_k n_k of a basis state.
  int excitations(Eigen::Index index) const;

  /// Places a single-subsystem operator into the full space: I x ... x op x ... x I.
  Operator embed(const Operator& local, std::size_t subsystem) const;
  Operator annihilation(std::size_t subsystem) const;
  Operator number(std::size_t subsystem) const;
  Operator total_number() const;

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index dimension_ = 1;
};

HilbertSpace compose_space(std::vector<int> dims, std::vector<std::string> labels = {});

/// Number of uniform RK4 steps used to cover `interval` at nominal step `dt`.
int step_count(double interval, double dt);

/// Writes H(t) into `out`; `out` is preallocated to the system dimension.
using HamiltonianFn = std::function<void(double t, Operator& out)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> populations;
  std::optional<StateVector> final_state;
  std::optional<DensityMatrix> final_density;
  std::optional<Operator> final_unitary;
};

/// Time-ordered propagator U(T) from fixed-step RK4 on dU/dt = -i H U.
Operator propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dimension, double duration,
                           double dt = kDefaultStep);

/// Same, starting at absolute time t0 (carrier phases follow the absolute clock).
Operator propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dimension, double t0, double t1,
                           double dt);

/// Integrates the Schroedinger equation, recording populations on `grid`.
/// The grid must start at 0 (relative to `t0`) and be strictly increasing.
Trajectory propagate_state(const HamiltonianFn& hamiltonian, const StateVector& psi0,
                           std::span<const double> grid, double dt = kDefaultStep, double t0 = 0.0);

/// Lindblad master equation with the given collapse operators.
Trajectory propagate_lindblad(const HamiltonianFn& hamiltonian, std::span<const Operator> collapse,
                              const DensityMatrix& rho0, std::span<const double> grid,
                              double dt = kDefaultStep, double t0 = 0.0);

/// Subset of basis states of a HilbertSpace, in increasing flat-index order.
struct Sector {
  std::vector<Eigen::Index> basis;
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(basis.size()); }
};

Sector excitation_sector(const HilbertSpace& space, std::span<const int> excitation_counts);
Sector excitation_sector(const HilbertSpace& space, int excitations);

/// max |[H, N]| for the total excitation number N.
double excitation_commutator(const Operator& h, const HilbertSpace& space);

/// P H P on the sector; no conservation check.
Operator project(const Operator& full, const Sector& sector);

/// Projects onto the n-excitation sector after checking that H conserves
/// excitation number (max|[H,N]| < tol). Throws otherwise.
Operator restrict_to_sector(const Operator& h, const HilbertSpace& space, int excitations, double tol = 1e-9);

StateVector lift(const StateVector& restricted, const Sector& sector, Eigen::Index full_dimension);
StateVector restrict_state(const StateVector& full, const Sector& sector);

double unitarity_deviation(const Operator& u);
double hermiticity_deviation(const Operator& h);
std::vector<double> populations(const StateVector& psi);
std::vector<double> populations(const DensityMatrix& rho);

}  // namespace qlink::hilbert
