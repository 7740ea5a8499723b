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

#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "analysis.hpp"
#include "parallel.hpp"

namespace qlink::optimize {

namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value)) fail(ErrorCode::kNumerical, std::string("non-finite ") + what);
  return value;
}

// Open-interval grid points offset + k * step strictly inside (lo, hi).
std::vector<double> axis(double lo, double hi, double center, double half_width, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor(half_width / step + 1e-9));
  for (int k = -n; k <= n; ++k) {
    const double x = center + k * step;
    if (x > lo + 1e-9 && x < hi - 1e-9) out.push_back(x);
  }
  return out;
}

}  // namespace

void AdamConfig::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
  require(beta1 > 0.0 && beta1 < 1.0, "beta1 must lie in (0, 1)");
  require(beta2 > 0.0 && beta2 < 1.0, "beta2 must lie in (0, 1)");
  require(epsilon > 0.0, "Adam epsilon must be positive");
  require(max_iterations >= 0, "max iterations must be non-negative");
  require(tolerance >= 0.0, "tolerance must be non-negative");
  require(fd_step > 0.0, "finite-difference step must be positive");
}

void GridConfig::validate() const {
  require(coarse_step_mhz > 0.0, "coarse step must be positive");
  double previous = coarse_step_mhz;
  for (double s : refine_steps_mhz) {
    require(s > 0.0 && s < previous, "refinement steps must be positive and decreasing");
    previous = s;
  }
}

std::vector<double> finite_difference_gradient(const Objective& f, std::span<const double> x, double h,
                                               int workers) {
  require(h > 0.0, "finite-difference step must be positive");
  std::vector<double> grad(x.size());
  parallel_for(x.size(), workers, [&](std::size_t i) {
    std::vector<double> probe(x.begin(), x.end());
    probe[i] = x[i] + h;
    const double up = checked(f(probe), "objective in gradient");
    probe[i] = x[i] - h;
    const double down = checked(f(probe), "objective in gradient");
    grad[i] = (up - down) / (2.0 * h);
  });
  return grad;
}

OptimizationResult adam_minimize(const Objective& f, std::vector<double> x0, const AdamConfig& config,
                                 const Gradient& gradient, int workers) {
  config.validate();
  require(!x0.empty(), "Adam needs at least one parameter");
  const double initial = f(x0);
  if (!std::isfinite(initial)) fail(ErrorCode::kInvalidArgument, "objective is not finite at the starting point");

  OptimizationResult result;
  result.best_parameters = x0;
  result.best_loss = initial;
  result.history.push_back(initial);
  const double limit = 1e6 * std::max(std::abs(initial), std::numeric_limits<double>::min());

  std::vector<double> x = std::move(x0), m(x.size(), 0.0), v(x.size(), 0.0);
  double previous = initial;
  double b1 = 1.0, b2 = 1.0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::vector<double> g =
        gradient ? gradient(x) : finite_difference_gradient(f, x, config.fd_step, workers);
    require(g.size() == x.size(), "gradient size does not match the parameters");
    b1 *= config.beta1;
    b2 *= config.beta2;
    for (std::size_t i = 0; i < x.size(); ++i) {
      checked(g[i], "gradient");
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double mh = m[i] / (1.0 - b1);
      const double vh = v[i] / (1.0 - b2);
      x[i] -= config.learning_rate * mh / (std::sqrt(vh) + config.epsilon);
    }
    const double loss = f(x);
    if (!std::isfinite(loss) || loss > limit) {
      fail(ErrorCode::kNumerical, "Adam diverged at iteration " + std::to_string(it) + " (loss " +
                                      std::to_string(loss) + ", initial " + std::to_string(initial) + ")");
    }
    result.history.push_back(loss);
    result.iterations = it;
    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.best_parameters = x;
    }
    if (config.tolerance > 0.0 && std::abs(previous - loss) < config.tolerance) {
      result.converged = true;
      break;
    }
    previous = loss;
  }
  return result;
}

device::DeviceSpec ladder_from(const device::RawDevice& base, double fsr_mhz) {
  device::RawDevice raw = base;
  if (!raw.center_mode_ghz) {
    raw.center_mode_ghz = raw.mode_freqs_ghz.empty() ? 5.83 : raw.mode_freqs_ghz[raw.target_mode.value_or(raw.mode_freqs_ghz.size() / 2)];
  }
  raw.mode_freqs_ghz.clear();
  raw.target_mode.reset();
  raw.length_m.reset();
  raw.fsr_mhz = fsr_mhz;
  return device::build_device(raw);
}

FrequencySearch optimize_frequencies(const device::DeviceSpec& device, const pulse::Envelope& shape,
                                     std::array<double, 2> averages_mhz, const GridConfig& grid,
                                     holonomic::Frame frame, const holonomic::SimulationOptions& options) {
  grid.validate();
  require(device.fsr_mhz.has_value() && *device.fsr_mhz > 0.0, "frequency search needs a device with an FSR");
  const double fsr = *device.fsr_mhz;
  const double m2 = device.frame_reference_ghz;
  if (grid.coarse_step_mhz >= fsr) fail(ErrorCode::kInvalidArgument, "frequency search domain is empty");

  const auto at = [&](double o1, double o2) { return device::with_qubit_frequencies(device, m2 + o1 * 1e-3, m2 + o2 * 1e-3); };
  const auto base_device = at(0.5 * fsr, -0.5 * fsr);
  auto base = holonomic::synthesize_drives(base_device, holonomic::GateTarget::swap(), shape, averages_mhz);
  base.frame = frame;

  holonomic::SimulationOptions sim = options;
  std::shared_ptr<const device::DriveTable> table;
  if (frame == holonomic::Frame::kRotating) {
    sim.table_cache = &table;
    holonomic::run_from_10(base_device, base, sim);  // warm the shared Bessel table
  } else {
    sim.table_cache = nullptr;
    sim.dressed = true;
  }
  const bool transfer = frame == holonomic::Frame::kLab;
  const auto basis = holonomic::model_basis(device);

  struct Point {
    double o1, o2, objective, leakage;
  };
  FrequencySearch out;
  const auto scan = [&](const std::vector<double>& a1, const std::vector<double>& a2) {
    std::vector<Point> pts;
    for (double o1 : a1)
      for (double o2 : a2) pts.push_back({o1, o2, 0.0, 0.0});
    parallel_for(pts.size(), grid.workers, [&](std::size_t k) {
      auto& p = pts[k];
      const auto d = at(p.o1, p.o2);
      const StateVector psi = holonomic::run_from_10(d, holonomic::retune(base, d), sim);
      p.leakage = analysis::leakage(psi, basis);
      p.objective = transfer ? 1.0 - std::norm(psi(basis.qubit(1))) : p.leakage;
    });
    out.evaluations += pts.size();
    return pts;
  };
  const auto best_of = [](const std::vector<Point>& pts, const Point& incumbent) {
    Point best = incumbent;
    for (const auto& p : pts) {
      if (p.objective < best.objective) best = p;
    }
    return best;
  };

  const auto coarse = scan(axis(0.0, fsr, 0.0, fsr, grid.coarse_step_mhz), axis(-fsr, 0.0, 0.0, fsr, grid.coarse_step_mhz));
  if (coarse.empty()) fail(ErrorCode::kInvalidArgument, "frequency search domain is empty");
  Point best = best_of(coarse, {0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0});
  out.coarse_best = best.objective;
  double previous = grid.coarse_step_mhz;
  for (double step : grid.refine_steps_mhz) {
    best = best_of(scan(axis(0.0, fsr, best.o1, previous, step), axis(-fsr, 0.0, best.o2, previous, step)), best);
    previous = step;
  }

  const auto d = at(best.o1, best.o2);
  out.q1_ghz = d.qubit_freq_ghz[0];
  out.q2_ghz = d.qubit_freq_ghz[1];
  out.objective = best.objective;
  out.leakage = best.leakage;
  out.schedule = holonomic::retune(base, d);
  return out;
}

holonomic::GateSchedule waveform_schedule(const device::DeviceSpec& device, const WaveformConfig& config,
                                          std::span<const double> parameters) {
  require(parameters.size() == config.knots + (config.optimize_detuning ? 2 : 0),
          "waveform parameter count does not match the configuration");
  std::vector<double> knots(config.knots);
  for (std::size_t k = 0; k < config.knots; ++k) knots[k] = std::abs(parameters[k]);
  require(*std::max_element(knots.begin(), knots.end()) > 0.0, "all waveform knots are zero");
  const auto shape = pulse::Envelope::parameterized(1.0, 1.0, std::move(knots));
  std::array<double, 2> detuning{0.0, 0.0};
  if (config.optimize_detuning) detuning = {parameters[config.knots], parameters[config.knots + 1]};
  return holonomic::synthesize_drives(device, config.target, shape, config.averages_mhz, detuning);
}

WaveformResult optimize_waveform(const device::DeviceSpec& device, const WaveformConfig& config) {
  require(config.knots >= 2, "waveform needs at least two knots");
  holonomic::SimulationOptions sim = config.simulation;
  sim.table_cache = nullptr;
  const Operator ideal = holonomic::target_unitary(config.target);
  const auto basis = holonomic::model_basis(device);

  const Objective loss = [&](std::span<const double> p) {
    return analysis::gate_loss(ideal, holonomic::subspace_block(device, waveform_schedule(device, config, p), sim));
  };

  WaveformResult out;
  {
    const auto cosine = holonomic::synthesize_drives(device, config.target, pulse::Envelope::cosine(1.0, 1.0),
                                                     config.averages_mhz);
    const StateVector psi = holonomic::run_from_10(device, cosine, sim);
    out.baseline_leakage = analysis::leakage(psi, basis);
    out.baseline_modes = analysis::mode_populations(psi, basis);
  }

  std::vector<double> x0 = config.initial_parameters;
  if (x0.empty()) {
    x0 = pulse::cosine_equivalent_knots(config.knots);
    if (config.optimize_detuning) x0.insert(x0.end(), {0.0, 0.0});
  }
  out.optimization = adam_minimize(loss, x0, config.adam, {}, config.workers);
  out.initial_loss = out.optimization.history.front();
  out.final_loss = out.optimization.best_loss;

  const auto& best = out.optimization.best_parameters;
  out.schedule = waveform_schedule(device, config, best);
  std::vector<double> knots(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(config.knots));
  for (double& v : knots) v = std::abs(v);
  out.envelope = pulse::Envelope::parameterized(out.schedule.duration_ns, 1.0, std::move(knots));
  if (config.optimize_detuning) out.detuning_mhz = {best[config.knots], best[config.knots + 1]};
  const StateVector psi = holonomic::run_from_10(device, out.schedule, sim);
  out.final_leakage = analysis::leakage(psi, basis);
  out.final_modes = analysis::mode_populations(psi, basis);
  return out;
}

}  // namespace qlink::optimize
