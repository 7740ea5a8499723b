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

#include "hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qlink::hilbert {
namespace {

constexpr Complex kMinusI{0.0, -1.0};

void check_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::kInvalidArgument, "time step must be positive");
}

void check_finite(const Operator& h, double t) {
  if (!h.allFinite()) {
    std::ostringstream os;
    os << "non-finite Hamiltonian sample at t = " << t << " ns";
    fail(ErrorCode::kNumerical, os.str());
  }
}

void check_grid(std::span<const double> grid) {
  require(!grid.empty(), "time grid is empty");
  require(std::abs(grid.front()) < 1e-12, "time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    require(grid[k] > grid[k - 1], "time grid must be strictly increasing");
  }
}

// RK4 for dY/dt = -i H(t) Y where Y is a vector or a matrix of columns.
template <typename Block>
class SchroedingerStepper {
 public:
  SchroedingerStepper(const HamiltonianFn& hamiltonian, Eigen::Index dim, Eigen::Index cols)
      : hamiltonian_(hamiltonian), h_(Operator::Zero(dim, dim)) {
    k1_.resize(dim, cols);
    k2_.resize(dim, cols);
    k3_.resize(dim, cols);
    k4_.resize(dim, cols);
    tmp_.resize(dim, cols);
  }

  void advance(Block& y, double t, double h) {
    eval(t, y, k1_, true);
    tmp_ = y + (0.5 * h) * k1_;
    eval(t + 0.5 * h, tmp_, k2_, false);
    tmp_ = y + (0.5 * h) * k2_;
    eval(t + 0.5 * h, tmp_, k3_, false);
    tmp_ = y + h * k3_;
    eval(t + h, tmp_, k4_, false);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  void eval(double t, const Block& y, Block& out, bool check) {
    hamiltonian_(t, h_);
    if (check) check_finite(h_, t);
    out.noalias() = h_ * y;
    out *= kMinusI;
  }

  const HamiltonianFn& hamiltonian_;
  Operator h_;
  Block k1_, k2_, k3_, k4_, tmp_;
};

class LindbladStepper {
 public:
  LindbladStepper(const HamiltonianFn& hamiltonian, std::span<const Operator> collapse, Eigen::Index dim)
      : hamiltonian_(hamiltonian), collapse_(collapse.begin(), collapse.end()), h_(Operator::Zero(dim, dim)) {
    decay_ = Operator::Zero(dim, dim);
    for (const auto& l : collapse_) decay_ += l.adjoint() * l;
    decay_ *= 0.5;
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &tmp_}) m->resize(dim, dim);
  }

  void advance(DensityMatrix& rho, double t, double h) {
    eval(t, rho, k1_, true);
    tmp_ = rho + (0.5 * h) * k1_;
    eval(t + 0.5 * h, tmp_, k2_, false);
    tmp_ = rho + (0.5 * h) * k2_;
    eval(t + 0.5 * h, tmp_, k3_, false);
    tmp_ = rho + h * k3_;
    eval(t + h, tmp_, k4_, false);
    rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  void eval(double t, const DensityMatrix& rho, DensityMatrix& out, bool check) {
    hamiltonian_(t, h_);
    if (check) check_finite(h_, t);
    // -i (H_eff rho - rho H_eff^dag) + sum L rho L^dag, H_eff = H - i/2 sum L^dag L
    Operator heff = h_ - Complex(0.0, 1.0) * decay_;
    out.noalias() = kMinusI * (heff * rho);
    out.noalias() -= kMinusI * (rho * heff.adjoint());
    for (const auto& l : collapse_) out.noalias() += l * rho * l.adjoint();
  }

  const HamiltonianFn& hamiltonian_;
  std::vector<Operator> collapse_;
  Operator h_;
  Operator decay_;
  DensityMatrix k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

int step_count(double interval, double dt) {
  return std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-9)));
}

HilbertSpace::HilbertSpace(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  require(!dims_.empty(), "subsystem dimension list is empty");
  for (int d : dims_) require(d >= 2, "every subsystem needs at least 2 levels");
  if (labels_.empty()) {
    for (std::size_t k = 0; k < dims_.size(); ++k) labels_.push_back("s" + std::to_string(k));
  }
  require(labels_.size() == dims_.size(), "label count does not match subsystem count");
  strides_.assign(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = dimension_;
    dimension_ *= dims_[k];
  }
}

std::vector<int> HilbertSpace::levels(Eigen::Index index) const {
  require(index >= 0 && index < dimension_, "basis index out of range");
  std::vector<int> out(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    out[k] = static_cast<int>((index / strides_[k]) % dims_[k]);
  }
  return out;
}

Eigen::Index HilbertSpace::index(std::span<const int> levels) const {
  require(levels.size() == dims_.size(), "multi-index has the wrong length");
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    require(levels[k] >= 0 && levels[k] < dims_[k], "level out of range");
    idx += levels[k] * strides_[k];
  }
  return idx;
}

int HilbertSpace::excitations(Eigen::Index index) const {
  auto lv = levels(index);
  return std::accumulate(lv.begin(), lv.end(), 0);
}

Operator HilbertSpace::embed(const Operator& local, std::size_t subsystem) const {
  require(subsystem < dims_.size(), "subsystem index out of range");
  require(local.rows() == dims_[subsystem] && local.cols() == dims_[subsystem],
          "local operator does not match subsystem dimension");
  Operator full = Operator::Zero(dimension_, dimension_);
  const Eigen::Index stride = strides_[subsystem];
  const Eigen::Index d = dims_[subsystem];
  for (Eigen::Index col = 0; col < dimension_; ++col) {
    const Eigen::Index digit = (col / stride) % d;
    const Eigen::Index base = col - digit * stride;
    for (Eigen::Index r = 0; r < d; ++r) {
      const Complex v = local(r, digit);
      if (v != Complex{}) full(base + r * stride, col) = v;
    }
  }
  return full;
}

Operator HilbertSpace::annihilation(std::size_t subsystem) const {
  require(subsystem < dims_.size(), "subsystem index out of range");
  const int d = dims_[subsystem];
  Operator a = Operator::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed(a, subsystem);
}

Operator HilbertSpace::number(std::size_t subsystem) const {
  require(subsystem < dims_.size(), "subsystem index out of range");
  const int d = dims_[subsystem];
  Operator n = Operator::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = k;
  return embed(n, subsystem);
}

Operator HilbertSpace::total_number() const {
  Operator n = Operator::Zero(dimension_, dimension_);
  for (Eigen::Index i = 0; i < dimension_; ++i) n(i, i) = excitations(i);
  return n;
}

HilbertSpace compose_space(std::vector<int> dims, std::vector<std::string> labels) {
  return HilbertSpace(std::move(dims), std::move(labels));
}

Operator propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dimension, double duration, double dt) {
  return propagate_unitary(hamiltonian, dimension, 0.0, duration, dt);
}

Operator propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dimension, double t0, double t1,
                           double dt) {
  check_step(dt);
  require(dimension > 0, "dimension must be positive");
  require(t1 >= t0, "propagation interval must be non-negative");
  Operator u = Operator::Identity(dimension, dimension);
  if (t1 == t0) return u;
  const int n = step_count(t1 - t0, dt);
  const double h = (t1 - t0) / n;
  SchroedingerStepper<Operator> stepper(hamiltonian, dimension, dimension);
  for (int k = 0; k < n; ++k) stepper.advance(u, t0 + k * h, h);
  if (!u.allFinite()) fail(ErrorCode::kNumerical, "propagator diverged");
  return u;
}

Trajectory propagate_state(const HamiltonianFn& hamiltonian, const StateVector& psi0, std::span<const double> grid,
                           double dt, double t0) {
  check_step(dt);
  check_grid(grid);
  require(std::abs(psi0.norm() - 1.0) < 1e-10, "initial state is not normalized");
  Trajectory traj;
  StateVector psi = psi0;
  SchroedingerStepper<StateVector> stepper(hamiltonian, psi.size(), 1);
  traj.times.push_back(grid.front());
  traj.populations.push_back(populations(psi));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const int n = step_count(span, dt);
    const double h = span / n;
    for (int s = 0; s < n; ++s) stepper.advance(psi, t0 + grid[k - 1] + s * h, h);
    traj.times.push_back(grid[k]);
    traj.populations.push_back(populations(psi));
  }
  if (!psi.allFinite()) fail(ErrorCode::kNumerical, "state propagation diverged");
  traj.final_state = psi;
  return traj;
}

Trajectory propagate_lindblad(const HamiltonianFn& hamiltonian, std::span<const Operator> collapse,
                              const DensityMatrix& rho0, std::span<const double> grid, double dt, double t0) {
  check_step(dt);
  check_grid(grid);
  const Eigen::Index dim = rho0.rows();
  require(rho0.cols() == dim, "density matrix must be square");
  for (const auto& l : collapse) {
    require(l.rows() == dim && l.cols() == dim, "collapse operator dimension mismatch");
  }
  require(std::abs(rho0.trace().real() - 1.0) < 1e-10, "initial density matrix must have unit trace");
  Trajectory traj;
  DensityMatrix rho = rho0;
  LindbladStepper stepper(hamiltonian, collapse, dim);
  traj.times.push_back(grid.front());
  traj.populations.push_back(populations(rho));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const int n = step_count(span, dt);
    const double h = span / n;
    for (int s = 0; s < n; ++s) stepper.advance(rho, t0 + grid[k - 1] + s * h, h);
    traj.times.push_back(grid[k]);
    traj.populations.push_back(populations(rho));
  }
  if (!rho.allFinite()) fail(ErrorCode::kNumerical, "master equation diverged");
  traj.final_density = rho;
  return traj;
}

Sector excitation_sector(const HilbertSpace& space, std::span<const int> excitation_counts) {
  Sector s;
  for (Eigen::Index i = 0; i < space.dimension(); ++i) {
    const int n = space.excitations(i);
    if (std::find(excitation_counts.begin(), excitation_counts.end(), n) != excitation_counts.end()) {
      s.basis.push_back(i);
    }
  }
  return s;
}

Sector excitation_sector(const HilbertSpace& space, int excitations) {
  const int counts[] = {excitations};
  return excitation_sector(space, counts);
}

double excitation_commutator(const Operator& h, const HilbertSpace& space) {
  require(h.rows() == space.dimension() && h.cols() == space.dimension(), "operator does not match space");
  double worst = 0.0;
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    const int nc = space.excitations(c);
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      const int nr = space.excitations(r);
      if (nr != nc) worst = std::max(worst, std::abs(h(r, c)) * std::abs(nr - nc));
    }
  }
  return worst;
}

Operator project(const Operator& full, const Sector& sector) {
  const Eigen::Index d = sector.dimension();
  Operator out(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) out(r, c) = full(sector.basis[r], sector.basis[c]);
  }
  return out;
}

Operator restrict_to_sector(const Operator& h, const HilbertSpace& space, int excitations, double tol) {
  const double comm = excitation_commutator(h, space);
  if (comm >= tol) {
    std::ostringstream os;
    os << "Hamiltonian does not conserve excitation number (max|[H,N]| = " << comm
       << "); use full-space propagation";
    fail(ErrorCode::kInvalidArgument, os.str());
  }
  return project(h, excitation_sector(space, excitations));
}

StateVector lift(const StateVector& restricted, const Sector& sector, Eigen::Index full_dimension) {
  require(restricted.size() == sector.dimension(), "state does not match sector");
  StateVector full = StateVector::Zero(full_dimension);
  for (Eigen::Index k = 0; k < sector.dimension(); ++k) full(sector.basis[k]) = restricted(k);
  return full;
}

StateVector restrict_state(const StateVector& full, const Sector& sector) {
  StateVector out(sector.dimension());
  for (Eigen::Index k = 0; k < sector.dimension(); ++k) out(k) = full(sector.basis[k]);
  return out;
}

double unitarity_deviation(const Operator& u) {
  const Operator d = u.adjoint() * u - Operator::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

double hermiticity_deviation(const Operator& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

std::vector<double> populations(const StateVector& psi) {
  std::vector<double> p(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) p[i] = std::norm(psi(i));
  return p;
}

std::vector<double> populations(const DensityMatrix& rho) {
  std::vector<double> p(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) p[i] = rho(i, i).real();
  return p;
}

}  // namespace qlink::hilbert
