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

#include "device.hpp"

#include <algorithm>
#include <cmath>

#include "bessel.hpp"

namespace qlink::device {
namespace {

constexpr double kTableSlack = 1e-9;

bool sane_ghz(double f) { return std::isfinite(f) && f >= 1.0 && f <= 20.0; }

std::vector<double> broadcast(const std::vector<double>& values, std::size_t n, const char* name) {
  require(!values.empty(), std::string(name) + " must not be empty");
  if (values.size() == 1) return std::vector<double>(n, values.front());
  require(values.size() == n, std::string(name) + " must list one value per mode or a single value");
  return values;
}

double parity(std::ptrdiff_t k) { return (k % 2 == 0) ? 1.0 : -1.0; }

void check_drives(std::span<const pulse::DriveSignal> drives) {
  for (const auto& d : drives) {
    require(d.qubit == 0 || d.qubit == 1, "drive references qubit " + std::to_string(d.qubit + 1) +
                                              " but the device has two qubits");
  }
}

// Offset of qubit i from the frame reference, rad/ns.
double qubit_offset(const DeviceSpec& device, int i) {
  return ghz_to_angular(device.qubit_freq_ghz[i] - device.frame_reference_ghz);
}

// Signed peak modulation index A / (omega_ref - omega_Q).
double modulation_index(const DeviceSpec& device, const pulse::DriveSignal& d) {
  const double detuning = device.mode_qubit_detuning_mhz(d.qubit);
  require(std::abs(detuning) > 0.0, "qubit frequency coincides with the frame reference");
  return d.envelope.peak() / detuning;
}

bool in_window(const pulse::DriveSignal& d, double t) {
  return t >= d.start_ns - kTableSlack && t <= d.end_ns() + kTableSlack;
}

double local_shape(const pulse::DriveSignal& d, double t) {
  return d.envelope.shape((t - d.start_ns) / d.envelope.duration());
}

Operator static_rotating(const DeviceSpec& device, const ModelBasis& basis) {
  Operator h = Operator::Zero(basis.dimension(), basis.dimension());
  for (std::size_t j = 0; j < device.modes(); ++j) {
    h(basis.mode(j), basis.mode(j)) = ghz_to_angular(device.mode_freq_ghz[j] - device.frame_reference_ghz);
  }
  return h;
}

}  // namespace

std::string DeviceSpec::mode_label(std::size_t j) const {
  return "M" + std::to_string(static_cast<long>(j) - static_cast<long>(target_mode) + target_label);
}

double DeviceSpec::mode_qubit_detuning_mhz(int qubit) const {
  return (frame_reference_ghz - qubit_freq_ghz.at(static_cast<std::size_t>(qubit))) * 1e3;
}

DeviceSpec build_device(const RawDevice& raw) {
  for (int i = 0; i < 2; ++i) {
    require(sane_ghz(raw.qubit_freq_ghz[i]), "qubit " + std::to_string(i + 1) + " frequency must lie in 1-20 GHz");
    require(std::isfinite(raw.anharmonicity_mhz[i]) && std::abs(raw.anharmonicity_mhz[i]) < 1000.0,
            "anharmonicity magnitude must be below 1 GHz");
  }
  require(raw.qubit_levels == 2 || raw.qubit_levels == 3, "qubit levels must be 2 or 3");
  require(raw.velocity_m_per_s > 0.0, "cable velocity must be positive");

  const bool explicit_form = !raw.mode_freqs_ghz.empty();
  const bool ladder_form = raw.center_mode_ghz.has_value();
  require(explicit_form != ladder_form, "give either explicit mode frequencies or a center mode with an FSR ladder");

  DeviceSpec d;
  d.qubit_freq_ghz = raw.qubit_freq_ghz;
  d.anharmonicity_mhz = raw.anharmonicity_mhz;
  d.qubit_levels = raw.qubit_levels;
  d.velocity_m_per_s = raw.velocity_m_per_s;

  std::optional<double> fsr = raw.fsr_mhz;
  if (fsr) require(std::isfinite(*fsr) && *fsr > 0.0, "FSR must be positive");
  if (raw.length_m) {
    require(std::isfinite(*raw.length_m) && *raw.length_m > 0.0, "cable length must be positive");
    const double implied = fsr_from_length(*raw.length_m, raw.velocity_m_per_s);
    if (fsr) {
      require(std::abs(implied - *fsr) <= 0.01 * *fsr,
              "cable length and FSR disagree by more than 1% at the configured velocity");
    } else {
      fsr = implied;
    }
  }
  d.fsr_mhz = fsr;

  if (explicit_form) {
    require(!raw.target_mode || *raw.target_mode < raw.mode_freqs_ghz.size(), "target mode index out of range");
    for (double f : raw.mode_freqs_ghz) require(sane_ghz(f), "mode frequencies must lie in 1-20 GHz");
    d.mode_freq_ghz = raw.mode_freqs_ghz;
    d.target_mode = raw.target_mode.value_or(raw.mode_freqs_ghz.size() / 2);
  } else {
    require(raw.mode_count >= 1 && raw.mode_count <= 15, "mode count must be in 1..15");
    require(sane_ghz(*raw.center_mode_ghz), "center mode frequency must lie in 1-20 GHz");
    require(fsr.has_value() || raw.mode_count == 1, "a mode ladder needs fsr_mhz or a cable length");
    const double step = fsr.value_or(0.0) * 1e-3;
    d.target_mode = static_cast<std::size_t>(raw.mode_count / 2);
    for (int j = 0; j < raw.mode_count; ++j) {
      // Labels follow the measured device: M1 sits above M2, M3 below.
      const double f = *raw.center_mode_ghz - (j - static_cast<double>(d.target_mode)) * step;
      require(sane_ghz(f), "ladder mode " + std::to_string(j) + " falls outside 1-20 GHz");
      d.mode_freq_ghz.push_back(f);
    }
  }
  d.frame_reference_ghz = d.mode_freq_ghz[d.target_mode];

  const std::size_t n = d.modes();
  const auto g1 = broadcast(raw.g1_mhz, n, "g1_mhz");
  const auto g2 = broadcast(raw.g2_mhz, n, "g2_mhz");
  for (std::size_t j = 0; j < n; ++j) {
    require(std::isfinite(g1[j]) && std::isfinite(g2[j]) && g1[j] != 0.0 && g2[j] != 0.0,
            "coupling magnitudes must be non-zero");
    d.coupling_mhz[0].push_back(std::abs(g1[j]));
    d.coupling_mhz[1].push_back(parity(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(d.target_mode)) *
                                std::abs(g2[j]));
  }
  return d;
}

DeviceSpec paper_device() {
  RawDevice raw;
  raw.mode_freqs_ghz = {6.36, 5.83, 5.38};
  raw.target_mode = 1;
  return build_device(raw);
}

DeviceSpec ladder_device(double fsr_mhz, int mode_count) {
  RawDevice raw;
  raw.center_mode_ghz = 5.83;
  raw.fsr_mhz = fsr_mhz;
  raw.mode_count = mode_count;
  return build_device(raw);
}

DeviceSpec with_qubit_frequencies(const DeviceSpec& device, double q1_ghz, double q2_ghz) {
  require(sane_ghz(q1_ghz) && sane_ghz(q2_ghz), "qubit frequencies must lie in 1-20 GHz");
  DeviceSpec d = device;
  d.qubit_freq_ghz = {q1_ghz, q2_ghz};
  return d;
}

DeviceSpec with_target_shift(const DeviceSpec& device, double shift_mhz) {
  DeviceSpec d = device;
  d.mode_freq_ghz[d.target_mode] += shift_mhz * 1e-3;
  return d;
}

double fsr_from_length(double length_m, double velocity_m_per_s) {
  require(length_m > 0.0 && velocity_m_per_s > 0.0, "length and velocity must be positive");
  return velocity_m_per_s / (2.0 * length_m) * 1e-6;
}

double length_from_fsr(double fsr_mhz, double velocity_m_per_s) {
  require(fsr_mhz > 0.0 && velocity_m_per_s > 0.0, "FSR and velocity must be positive");
  return velocity_m_per_s / (2.0 * fsr_mhz * 1e6);
}

bool NoiseSpec::lossless() const {
  return !qubit_t1_us[0] && !qubit_t1_us[1] && !qubit_tphi_us[0] && !qubit_tphi_us[1] && !mode_t1_us &&
         !mode_tphi_us;
}

void NoiseSpec::validate() const {
  auto check = [](const std::optional<double>& v, const char* name) {
    require(!v || (std::isfinite(*v) && *v > 0.0), std::string(name) + " must be positive");
  };
  check(qubit_t1_us[0], "t1_q1_us");
  check(qubit_t1_us[1], "t1_q2_us");
  check(qubit_tphi_us[0], "tphi_q1_us");
  check(qubit_tphi_us[1], "tphi_q2_us");
  check(mode_t1_us, "t1_mode_us");
  check(mode_tphi_us, "tphi_mode_us");
}

NoiseSpec default_noise() {
  NoiseSpec n;
  n.qubit_t1_us = {3.0, 3.0};
  n.qubit_tphi_us = {2.5, 2.5};
  n.mode_t1_us = 1.0;
  return n;
}

std::vector<Operator> collapse_operators(const DeviceSpec& device, const NoiseSpec& noise, const ModelBasis& basis) {
  noise.validate();
  require(basis.ground || noise.lossless(), "relaxation needs the ground state in the model basis");
  std::vector<Operator> ops;
  const Eigen::Index dim = basis.dimension();
  auto add = [&](Eigen::Index level, const std::optional<double>& t1, const std::optional<double>& tphi) {
    if (t1) {
      Operator l = Operator::Zero(dim, dim);
      l(basis.ground_index(), level) = std::sqrt(1.0 / (*t1 * 1e3));
      ops.push_back(std::move(l));
    }
    if (tphi) {
      // Rate 2/T_phi on n makes coherences decay as exp(-t/T_phi).
      Operator l = Operator::Zero(dim, dim);
      l(level, level) = std::sqrt(2.0 / (*tphi * 1e3));
      ops.push_back(std::move(l));
    }
  };
  for (int i = 0; i < 2; ++i) add(basis.qubit(i), noise.qubit_t1_us[i], noise.qubit_tphi_us[i]);
  for (std::size_t j = 0; j < device.modes(); ++j) add(basis.mode(j), noise.mode_t1_us, noise.mode_tphi_us);
  return ops;
}

hilbert::HilbertSpace device_space(const DeviceSpec& device) {
  std::vector<int> dims{device.qubit_levels, device.qubit_levels};
  std::vector<std::string> labels{"Q1", "Q2"};
  for (std::size_t j = 0; j < device.modes(); ++j) {
    dims.push_back(2);
    labels.push_back(device.mode_label(j));
  }
  return hilbert::HilbertSpace(std::move(dims), std::move(labels));
}

Operator lab_frame_hamiltonian(const DeviceSpec& device, std::span<const pulse::DriveSignal> drives, double t) {
  check_drives(drives);
  const auto space = device_space(device);
  const Eigen::Index dim = space.dimension();
  Operator h = Operator::Zero(dim, dim);
  std::array<Operator, 2> a;
  std::array<double, 2> drive_sum{0.0, 0.0};
  for (const auto& d : drives) {
    drive_sum[d.qubit] += mhz_to_angular(d.amplitude(t)) * std::cos(mhz_to_angular(d.modulation_mhz) * t + d.phase_rad);
  }
  for (int i = 0; i < 2; ++i) {
    a[i] = space.annihilation(i);
    const Operator n = a[i].adjoint() * a[i];
    h += (ghz_to_angular(device.qubit_freq_ghz[i]) + drive_sum[i]) * n;
    h += 0.5 * mhz_to_angular(device.anharmonicity_mhz[i]) * (n * n - n);
  }
  for (std::size_t j = 0; j < device.modes(); ++j) {
    const Operator b = space.annihilation(2 + j);
    h += ghz_to_angular(device.mode_freq_ghz[j]) * (b.adjoint() * b);
    for (int i = 0; i < 2; ++i) {
      const Operator x = a[i].adjoint() * b;
      h += mhz_to_angular(device.coupling_mhz[i][j]) * (x + x.adjoint());
    }
  }
  return h;
}

Operator rotating_frame_hamiltonian(const DeviceSpec& device, std::span<const pulse::DriveSignal> drives, double t,
                                    Expansion expansion) {
  RotatingFrameModel model(device, std::vector<pulse::DriveSignal>(drives.begin(), drives.end()), expansion);
  Operator h(model.dimension(), model.dimension());
  model(t, h);
  return h;
}

DriveTable::DriveTable(std::span<const pulse::DriveSignal> drives, std::span<const double> indices, double half_step,
                       double end_time)
    : indices_(indices.begin(), indices.end()), half_step_(half_step) {
  require(half_step > 0.0 && end_time >= 0.0, "table step must be positive");
  require(drives.size() == indices.size(), "one modulation index per drive");
  const auto samples = static_cast<std::size_t>(std::ceil(end_time / half_step)) + 2;
  j1_.assign(drives.size(), std::vector<double>(samples, 0.0));
  j2_.assign(drives.size(), std::vector<double>(samples, 0.0));
  for (std::size_t d = 0; d < drives.size(); ++d) {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = static_cast<double>(k) * half_step;
      if (!in_window(drives[d], t)) continue;
      const double z = indices_[d] * local_shape(drives[d], t);
      j1_[d][k] = bessel::j(1, z);
      j2_[d][k] = bessel::j(2, z);
    }
  }
}

bool DriveTable::matches(std::span<const double> indices, double half_step) const {
  if (indices.size() != indices_.size() || std::abs(half_step - half_step_) > 1e-15) return false;
  for (std::size_t d = 0; d < indices.size(); ++d) {
    if (std::abs(indices[d] - indices_[d]) > 1e-12 * std::max(1.0, std::abs(indices_[d]))) return false;
  }
  return true;
}

bool DriveTable::lookup(std::size_t drive, double t, double& j1, double& j2) const {
  const double k = std::round(t / half_step_);
  if (k < 0.0 || std::abs(k * half_step_ - t) > kTableSlack) return false;
  const auto idx = static_cast<std::size_t>(k);
  if (idx >= j1_[drive].size()) return false;
  j1 = j1_[drive][idx];
  j2 = j2_[drive][idx];
  return true;
}

RotatingFrameModel::RotatingFrameModel(DeviceSpec device, std::vector<pulse::DriveSignal> drives, Expansion expansion,
                                       bool with_ground)
    : device_(std::move(device)), drives_(std::move(drives)), expansion_(expansion) {
  check_drives(drives_);
  basis_.ground = with_ground;
  basis_.modes = device_.modes();
  for (const auto& d : drives_) indices_.push_back(modulation_index(device_, d));
  static_ = static_rotating(device_, basis_);
}

void RotatingFrameModel::use_table(double dt, double end_time, std::shared_ptr<const DriveTable> shared) {
  if (expansion_ != Expansion::kJacobiAnger) return;
  if (shared && shared->matches(indices_, 0.5 * dt)) {
    table_ = std::move(shared);
    return;
  }
  table_ = std::make_shared<DriveTable>(drives_, indices_, 0.5 * dt, end_time);
}

void RotatingFrameModel::coupling_factors(double t, std::array<Complex, 2>& factor) const {
  factor = {Complex(0.0), Complex(0.0)};
  if (expansion_ == Expansion::kExact) {
    std::array<double, 2> phase{0.0, 0.0};
    for (std::size_t d = 0; d < drives_.size(); ++d) {
      const auto& drive = drives_[d];
      if (!in_window(drive, t)) continue;
      const double z = indices_[d] * local_shape(drive, t);
      phase[drive.qubit] += z * std::sin(mhz_to_angular(drive.modulation_mhz) * t + drive.phase_rad);
    }
    for (int i = 0; i < 2; ++i) factor[i] = std::polar(1.0, -qubit_offset(device_, i) * t + phase[i]);
    return;
  }
  for (std::size_t d = 0; d < drives_.size(); ++d) {
    const auto& drive = drives_[d];
    if (!in_window(drive, t)) continue;
    double j1 = 0.0;
    double j2 = 0.0;
    if (!table_ || !table_->lookup(d, t, j1, j2)) {
      const double z = indices_[d] * local_shape(drive, t);
      j1 = bessel::j(1, z);
      j2 = bessel::j(2, z);
    }
    const Complex carrier = std::polar(1.0, mhz_to_angular(drive.modulation_mhz) * t + drive.phase_rad);
    const Complex offset = std::polar(1.0, -qubit_offset(device_, drive.qubit) * t);
    factor[drive.qubit] += (j1 + j2 * carrier) * carrier * offset;
  }
}

// B_i(t) multiplies the (mode, qubit) couplings of qubit i.
void RotatingFrameModel::operator()(double t, Operator& out) const {
  out = static_;
  std::array<Complex, 2> factor;
  coupling_factors(t, factor);
  for (int i = 0; i < 2; ++i) {
    const Eigen::Index q = basis_.qubit(i);
    for (std::size_t j = 0; j < device_.modes(); ++j) {
      const Complex c = mhz_to_angular(device_.coupling_mhz[i][j]) * factor[i];
      out(basis_.mode(j), q) = c;
      out(q, basis_.mode(j)) = std::conj(c);
    }
  }
}

StateVector RotatingFrameModel::evolve(const StateVector& psi0, double duration, double dt) {
  require(psi0.size() == dimension(), "state dimension does not match the model basis");
  require(dt > 0.0 && duration >= 0.0, "evolution needs dt > 0 and a non-negative duration");
  if (duration == 0.0) return psi0;
  const int n = hilbert::step_count(duration, dt);
  const double h = duration / n;
  if (!table_ || !table_->matches(indices_, 0.5 * h)) use_table(h, duration);

  const std::size_t m = device_.modes();
  const Eigen::Index q0 = basis_.qubit(0);
  const Eigen::Index m0 = basis_.mode(0);
  std::vector<double> detuning(m);
  std::array<std::vector<double>, 2> g;
  for (std::size_t j = 0; j < m; ++j) {
    detuning[j] = static_(m0 + static_cast<Eigen::Index>(j), m0 + static_cast<Eigen::Index>(j)).real();
    for (int i = 0; i < 2; ++i) g[i].push_back(mhz_to_angular(device_.coupling_mhz[i][j]));
  }

  auto derivative = [&](const std::array<Complex, 2>& f, const StateVector& y, StateVector& dy) {
    dy.setZero();
    const Complex q1 = y(q0);
    const Complex q2 = y(q0 + 1);
    Complex acc1(0.0);
    Complex acc2(0.0);
    const Complex c1 = f[0] * q1;
    const Complex c2 = f[1] * q2;
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::Index k = m0 + static_cast<Eigen::Index>(j);
      const Complex b = y(k);
      dy(k) = Complex(0.0, -1.0) * (detuning[j] * b + g[0][j] * c1 + g[1][j] * c2);
      acc1 += g[0][j] * b;
      acc2 += g[1][j] * b;
    }
    dy(q0) = Complex(0.0, -1.0) * std::conj(f[0]) * acc1;
    dy(q0 + 1) = Complex(0.0, -1.0) * std::conj(f[1]) * acc2;
  };

  StateVector psi = psi0;
  StateVector k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), tmp(psi.size());
  std::array<Complex, 2> f0, fm, f1;
  coupling_factors(0.0, f1);
  for (int s = 0; s < n; ++s) {
    const double t = s * h;
    f0 = f1;
    coupling_factors(t + 0.5 * h, fm);
    coupling_factors(t + h, f1);
    derivative(f0, psi, k1);
    tmp = psi + (0.5 * h) * k1;
    derivative(fm, tmp, k2);
    tmp = psi + (0.5 * h) * k2;
    derivative(fm, tmp, k3);
    tmp = psi + h * k3;
    derivative(f1, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!psi.allFinite()) fail(ErrorCode::kNumerical, "state evolution diverged");
  return psi;
}

LabFrameModel::LabFrameModel(const DeviceSpec& device, std::vector<pulse::DriveSignal> drives, bool with_ground)
    : drives_(std::move(drives)) {
  check_drives(drives_);
  basis_.ground = with_ground;
  basis_.modes = device.modes();
  static_ = static_rotating(device, basis_);
  for (int i = 0; i < 2; ++i) {
    const Eigen::Index q = basis_.qubit(i);
    static_(q, q) = qubit_offset(device, i);
    for (std::size_t j = 0; j < device.modes(); ++j) {
      const double g = mhz_to_angular(device.coupling_mhz[i][j]);
      static_(q, basis_.mode(j)) = g;
      static_(basis_.mode(j), q) = g;
    }
  }
}

void LabFrameModel::operator()(double t, Operator& out) const {
  out = static_;
  for (const auto& d : drives_) {
    const double a = d.amplitude(t);
    if (a == 0.0) continue;
    const Eigen::Index q = basis_.qubit(d.qubit);
    out(q, q) += mhz_to_angular(a) * std::cos(mhz_to_angular(d.modulation_mhz) * t + d.phase_rad);
  }
}

Operator dressed_basis(const DeviceSpec& device, bool with_ground) {
  LabFrameModel model(device, {}, with_ground);
  Operator h(model.dimension(), model.dimension());
  model(0.0, h);
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Operator& v = es.eigenvectors();
  const Eigen::Index n = h.rows();
  struct Pair {
    double overlap;
    Eigen::Index bare, eigen;
  };
  std::vector<Pair> pairs;
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index k = 0; k < n; ++k) pairs.push_back({std::norm(v(b, k)), b, k});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.overlap > y.overlap; });
  std::vector<bool> bare_used(n, false), eigen_used(n, false);
  Operator out(n, n);
  for (const auto& p : pairs) {
    if (bare_used[p.bare] || eigen_used[p.eigen]) continue;
    bare_used[p.bare] = eigen_used[p.eigen] = true;
    const Complex d = v(p.bare, p.eigen);
    out.col(p.bare) = v.col(p.eigen) * (std::abs(d) > 0.0 ? std::conj(d) / std::abs(d) : Complex(1.0));
  }
  return out;
}

EffectiveCoupling effective_coupling(double g_mhz, double amplitude_mhz, double detuning_mhz, double delta_mhz,
                                     double phase_rad, double t_ns) {
  require(std::isfinite(detuning_mhz) && detuning_mhz != 0.0, "qubit-mode detuning must be non-zero");
  const double z = amplitude_mhz / detuning_mhz;
  const double resonant = mhz_to_angular(delta_mhz) * t_ns + phase_rad;
  // The J2 sideband oscillates at omega_Q - omega_M2 + 2 delta.
  const double sideband = mhz_to_angular(-detuning_mhz + 2.0 * delta_mhz) * t_ns + 2.0 * phase_rad;
  return {g_mhz * bessel::j(1, z) * std::polar(1.0, -resonant), g_mhz * bessel::j(2, z) * std::polar(1.0, -sideband)};
}

double envelope_average(const pulse::Envelope& envelope, const DeviceSpec& device, int qubit) {
  require(qubit == 0 || qubit == 1, "qubit index must be 0 or 1");
  require(envelope.duration() > 0.0, "envelope duration must be positive");
  return pulse::envelope_average(envelope, device.coupling_mhz[qubit][device.target_mode],
                                 device.mode_qubit_detuning_mhz(qubit));
}

}  // namespace qlink::device
