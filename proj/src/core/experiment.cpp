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

#include "experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "analysis.hpp"
#include "optimize.hpp"

namespace qlink::experiment {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<std::string>& cells) {
    require(cells.size() == header_.size(), "CSV row width does not match the header");
    rows_.push_back(cells);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(number(v));
    row(cells);
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Context {
  const config::ExperimentConfig& config;
  std::string scenario;
  std::filesystem::path dir;
  std::uint64_t seed;
  int workers;
  std::vector<std::string> files;

  void write(const std::string& name, const Csv& csv) {
    if (!config.write_csv) return;
    const auto path = dir / (scenario + (name.empty() ? "" : "_" + name) + ".csv");
    csv.write(path);
    files.push_back(path.string());
  }
};

struct Summary {
  std::string gate;
  double duration_ns = 0.0;
  double loss = 0.0;
  double leakage = 0.0;
  double fidelity = 0.0;
  json params = json::object();
};

std::optional<device::NoiseSpec> noise_of(const config::ExperimentConfig& c) {
  if (!c.has_noise || c.noise.lossless()) return std::nullopt;
  return c.noise;
}

holonomic::GateSchedule build_schedule(const config::ExperimentConfig& c, const device::DeviceSpec& dev,
                                       json& params) {
  auto s = holonomic::synthesize_drives(dev, c.target(), c.shape(), c.averages_mhz(), c.delta_mhz);
  s.frame = c.frame;
  if (c.calibrate) {
    const double offset = holonomic::calibrate_detuning(dev, s, c.simulation());
    params["calibration_offset_mhz"] = offset;
    s = holonomic::offset_detuning(s, offset);
  }
  return s;
}

json describe(const holonomic::GateSchedule& s) {
  json drives = json::array();
  for (std::size_t k = 0; k < s.drives.size(); ++k) {
    const auto& d = s.drives[k];
    drives.push_back({{"qubit", d.qubit + 1},
                      {"envelope", std::string(pulse::to_string(d.envelope.kind()))},
                      {"peak_mhz", d.envelope.peak()},
                      {"peak_index", k < s.peak_index.size() ? s.peak_index[k] : 0.0},
                      {"modulation_mhz", d.modulation_mhz},
                      {"detuning_mhz", d.detuning_mhz},
                      {"phase_rad", d.phase_rad},
                      {"start_ns", d.start_ns},
                      {"duration_ns", d.envelope.duration()}});
  }
  return drives;
}

StateVector ideal_10(const holonomic::GateTarget& target) {
  const Operator v = holonomic::target_unitary(target);
  return v.col(0);
}

// Loss, leakage and fidelity of a schedule from |10>, closed or open.
void gate_metrics(const device::DeviceSpec& dev, const holonomic::GateSchedule& s,
                  const std::optional<device::NoiseSpec>& noise, const holonomic::SimulationOptions& sim,
                  Summary& out) {
  out.duration_ns = s.duration_ns;
  out.loss = analysis::gate_loss(holonomic::target_unitary(s.target), holonomic::subspace_block(dev, s, sim));
  const StateVector ideal = ideal_10(s.target);
  if (!noise) {
    const auto basis = holonomic::model_basis(dev);
    const StateVector psi = holonomic::run_from_10(dev, s, sim);
    out.leakage = analysis::leakage(psi, basis);
    StateVector target = StateVector::Zero(basis.dimension());
    target(basis.qubit(0)) = ideal(0);
    target(basis.qubit(1)) = ideal(1);
    out.fidelity = analysis::state_fidelity(target, psi);
    return;
  }
  const auto basis = holonomic::model_basis(dev, true);
  StateVector psi0 = StateVector::Zero(basis.dimension());
  psi0(basis.qubit(0)) = 1.0;
  const DensityMatrix rho = holonomic::run_open(dev, s, psi0 * psi0.adjoint(), *noise, sim);
  out.leakage = analysis::leakage(rho, basis);
  StateVector target = StateVector::Zero(basis.dimension());
  target(basis.qubit(0)) = ideal(0);
  target(basis.qubit(1)) = ideal(1);
  out.fidelity = analysis::state_fidelity(rho, DensityMatrix(target * target.adjoint()));
}

std::vector<std::string> mode_columns(const device::DeviceSpec& dev, const std::string& prefix) {
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < dev.modes(); ++j) {
    std::string label = dev.mode_label(j);
    for (char& ch : label) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    cols.push_back(prefix + label);
  }
  return cols;
}

std::vector<double> fsr_list(const config::ExperimentConfig& c, const char* scenario) {
  if (!c.fsr_list_mhz.empty()) return c.fsr_list_mhz;
  if (c.device.fsr_mhz) return {*c.device.fsr_mhz};
  if (c.device.length_m) return {device::fsr_from_length(*c.device.length_m, c.device.velocity_m_per_s)};
  fail(ErrorCode::kInvalidArgument, std::string(scenario) + " needs [sweep] fsr_list_mhz or a device FSR");
}

// ---- scenarios --------------------------------------------------------------

void dynamics(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto dev = c.build_device();
  const auto s = build_schedule(c, dev, sum.params);
  const auto noise = noise_of(c);
  const auto sim = c.simulation();
  const auto grid = holonomic::uniform_grid(s.duration_ns, c.time_points);
  StateVector psi0 = StateVector::Zero(holonomic::model_basis(dev).dimension());
  psi0(0) = 1.0;
  const auto traj = holonomic::simulate(dev, s, psi0, grid, noise, sim);

  const auto basis = holonomic::model_basis(dev, noise.has_value());
  std::vector<std::string> header{"time_ns", "pop_q1", "pop_q2"};
  for (const auto& m : mode_columns(dev, "pop_")) header.push_back(m);
  if (noise) header.push_back("pop_ground");
  header.push_back("leak_total");
  Csv csv(header);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& p = traj.populations[k];
    std::vector<double> r{grid[k], p[basis.qubit(0)], p[basis.qubit(1)]};
    double leak = 0.0;
    for (std::size_t j = 0; j < dev.modes(); ++j) {
      r.push_back(p[basis.mode(j)]);
      leak += p[basis.mode(j)];
    }
    if (noise) r.push_back(p[basis.ground_index()]);
    r.push_back(leak);
    csv.row(r);
  }
  ctx.write("", csv);
  gate_metrics(dev, s, noise, sim, sum);
  sum.params["drives"] = describe(s);
  sum.params["frame"] = c.frame == holonomic::Frame::kLab ? "lab" : "rotating";
  const auto& last = traj.populations.back();
  sum.params["final_pop_q1"] = last[basis.qubit(0)];
  sum.params["final_pop_q2"] = last[basis.qubit(1)];
}

void error_rate(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto dev = c.build_device();
  const auto s = build_schedule(c, dev, sum.params);
  const auto noise = noise_of(c);
  const auto sim = c.simulation();
  const auto split = analysis::decoherence_compensated_error(dev, s, c.n_max, noise, sim);
  Csv csv({"n", "population", "fit_population", "reference_population"});
  for (std::size_t k = 0; k < split.total.counts.size(); ++k) {
    const double n = split.total.counts[k];
    const double ref = k < split.dissipation.populations.size() ? split.dissipation.populations[k] : 1.0;
    csv.row(std::vector<double>{n, split.total.populations[k], split.total.intercept + split.total.slope * n, ref});
  }
  ctx.write("", csv);
  gate_metrics(dev, s, noise, sim, sum);
  sum.params["epsilon_total"] = split.total.epsilon;
  sum.params["epsilon_dissipation"] = split.dissipation.epsilon;
  sum.params["epsilon_coherent"] = split.coherent;
  sum.params["intercept"] = split.total.intercept;
  sum.params["residual"] = split.total.residual;
  sum.params["n_max"] = c.n_max;
  sum.params["drives"] = describe(s);
}

void robustness(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto dev = c.build_device();
  const auto sim = c.simulation();
  auto h = holonomic::synthesize_drives(dev, c.target(), c.shape(), c.averages_mhz(), c.delta_mhz);
  auto d = holonomic::dynamic_baseline_schedule(dev, h);
  h.frame = d.frame = c.frame;
  if (c.calibrate) {
    const double oh = holonomic::calibrate_detuning(dev, h, sim);
    const double od = holonomic::calibrate_detuning(dev, d, sim);
    h = holonomic::offset_detuning(h, oh);
    d = holonomic::offset_detuning(d, od);
    sum.params["calibration_offset_mhz"] = oh;
    sum.params["dynamic_calibration_offset_mhz"] = od;
  }
  const auto noise = noise_of(c);
  const auto grid = c.detuning_grid();
  const auto curve = analysis::robustness_sweep(dev, h, d, grid, noise, sim, ctx.workers, c.reference_detuning_mhz);
  Csv csv({"delta_mhz", "loss_holonomic", "loss_dynamic"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv.row(std::vector<double>{grid[k], curve.loss_holonomic[k], curve.loss_dynamic[k]});
  }
  ctx.write("", csv);
  gate_metrics(dev, h, noise, sim, sum);
  sum.params["reference_delta_mhz"] = curve.reference_mhz;
  sum.params["r_h"] = curve.reference_holonomic;
  sum.params["r_d"] = curve.reference_dynamic;
  sum.params["r_r"] = curve.relative_improvement;
  sum.params["dynamic_duration_ns"] = d.duration_ns;
}

void fsr_sweep(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  if (!c.has_section("sweep") || c.fsr_list_mhz.empty()) {
    fail(ErrorCode::kInvalidArgument, "fsr-sweep needs [sweep] fsr_list_mhz");
  }
  auto grid = c.grid;
  grid.workers = ctx.workers;
  Csv csv({"fsr_mhz", "length_cm", "q1_ghz", "q2_ghz", "leakage", "objective", "evaluations"});
  json points = json::array();
  for (double fsr : c.fsr_list_mhz) {
    const auto dev = optimize::ladder_from(c.device, fsr);
    const auto r = optimize::optimize_frequencies(dev, c.shape(), c.averages_mhz(), grid, c.frame, c.simulation());
    csv.row(std::vector<double>{fsr, 100.0 * device::length_from_fsr(fsr, c.device.velocity_m_per_s), r.q1_ghz,
                                r.q2_ghz, r.leakage, r.objective, static_cast<double>(r.evaluations)});
    points.push_back({{"fsr_mhz", fsr}, {"leakage", r.leakage}});
    sum.duration_ns = r.schedule.duration_ns;
    sum.leakage = std::max(sum.leakage, r.leakage);
  }
  ctx.write("", csv);
  sum.params["points"] = points;
  sum.params["envelope"] = std::string(pulse::to_string(c.envelope));
  sum.loss = std::nan("");
  sum.fidelity = std::nan("");
}

optimize::WaveformConfig waveform_config(const Context& ctx) {
  const auto& c = ctx.config;
  optimize::WaveformConfig w;
  w.adam = c.adam;
  w.target = c.target();
  w.averages_mhz = c.averages_mhz();
  w.optimize_detuning = c.optimize_detuning;
  w.simulation = c.simulation();
  w.workers = ctx.workers;
  if (!c.knots.empty()) w.knots = c.knots.size();
  std::vector<double> x0 = c.knots.empty() ? pulse::cosine_equivalent_knots(w.knots) : c.knots;
  if (c.init_jitter > 0.0) {
    std::mt19937_64 rng(ctx.seed);
    std::normal_distribution<double> normal(0.0, c.init_jitter);
    for (double& k : x0) k *= 1.0 + normal(rng);
  }
  if (w.optimize_detuning) x0.insert(x0.end(), {c.delta_mhz[0], c.delta_mhz[1]});
  w.initial_parameters = x0;
  return w;
}

void leakage_distribution(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto w = waveform_config(ctx);
  Csv csv({"fsr_mhz", "waveform", "mode", "population"});
  json points = json::array();
  for (double fsr : fsr_list(c, "leakage-distribution")) {
    const auto dev = optimize::ladder_from(c.device, fsr);
    const auto r = optimize::optimize_waveform(dev, w);
    for (std::size_t j = 0; j < dev.modes(); ++j) {
      csv.row({number(fsr), "cosine", dev.mode_label(j), number(r.baseline_modes[j])});
    }
    for (std::size_t j = 0; j < dev.modes(); ++j) {
      csv.row({number(fsr), "optimized", dev.mode_label(j), number(r.final_modes[j])});
    }
    points.push_back({{"fsr_mhz", fsr},
                      {"cosine_leakage", r.baseline_leakage},
                      {"optimized_leakage", r.final_leakage},
                      {"final_loss", r.final_loss}});
    sum.duration_ns = r.schedule.duration_ns;
    sum.loss = r.final_loss;
    sum.leakage = r.final_leakage;
  }
  ctx.write("", csv);
  sum.params["points"] = points;
  sum.fidelity = std::nan("");
}

void optimize_frequencies(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto fsrs = fsr_list(c, "optimize-frequencies");
  const auto dev = optimize::ladder_from(c.device, fsrs.front());
  auto grid = c.grid;
  grid.workers = ctx.workers;
  const auto r = optimize::optimize_frequencies(dev, c.shape(), c.averages_mhz(), grid, c.frame, c.simulation());
  Csv csv({"fsr_mhz", "q1_ghz", "q2_ghz", "leakage", "objective", "coarse_objective", "evaluations"});
  csv.row(std::vector<double>{fsrs.front(), r.q1_ghz, r.q2_ghz, r.leakage, r.objective, r.coarse_best,
                              static_cast<double>(r.evaluations)});
  ctx.write("", csv);
  const auto tuned = device::with_qubit_frequencies(dev, r.q1_ghz, r.q2_ghz);
  gate_metrics(tuned, r.schedule, std::nullopt, c.simulation(), sum);
  sum.leakage = r.leakage;
  sum.params["q1_ghz"] = r.q1_ghz;
  sum.params["q2_ghz"] = r.q2_ghz;
  sum.params["objective"] = c.frame == holonomic::Frame::kLab ? "transfer_loss" : "leakage";
  sum.params["objective_value"] = r.objective;
  sum.params["evaluations"] = r.evaluations;
}

void optimize_waveform(Context& ctx, Summary& sum) {
  const auto& c = ctx.config;
  const auto dev = c.build_device();
  const auto r = optimize::optimize_waveform(dev, waveform_config(ctx));
  Csv history({"iteration", "loss"});
  for (std::size_t k = 0; k < r.optimization.history.size(); ++k) {
    history.row(std::vector<double>{static_cast<double>(k), r.optimization.history[k]});
  }
  ctx.write("history", history);
  Csv knots({"knot", "value"});
  for (std::size_t k = 0; k < r.envelope.knots().size(); ++k) {
    knots.row(std::vector<double>{static_cast<double>(k), r.envelope.knots()[k]});
  }
  ctx.write("knots", knots);
  Csv modes({"mode", "cosine", "optimized"});
  for (std::size_t j = 0; j < dev.modes(); ++j) {
    modes.row({dev.mode_label(j), number(r.baseline_modes[j]), number(r.final_modes[j])});
  }
  ctx.write("modes", modes);
  gate_metrics(dev, r.schedule, std::nullopt, c.simulation(), sum);
  sum.params["initial_loss"] = r.initial_loss;
  sum.params["cosine_leakage"] = r.baseline_leakage;
  sum.params["iterations"] = r.optimization.iterations;
  sum.params["converged"] = r.optimization.converged;
  sum.params["detuning_mhz"] = {r.detuning_mhz[0], r.detuning_mhz[1]};
  sum.params["improvement"] = r.final_leakage > 0.0 ? r.baseline_leakage / r.final_leakage : 0.0;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"dynamics",    "error-rate",           "robustness",
                                              "fsr-sweep",   "leakage-distribution", "optimize-frequencies",
                                              "optimize-waveform"};
  return names;
}

RunResult run_experiment(const config::ExperimentConfig& config, const std::string& scenario,
                         const RunOptions& options) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    fail(ErrorCode::kInvalidArgument, "unknown scenario '" + scenario + "'");
  }
  Context ctx{config, scenario, options.out_dir.value_or(config.directory), options.seed.value_or(config.seed),
              options.workers.value_or(config.workers), {}};
  require(ctx.workers >= 1, "workers must be at least 1");
  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory " + ctx.dir.string() + ": " + ec.message());

  const auto start = Clock::now();
  Summary sum;
  sum.gate = std::string(holonomic::to_string(config.gate));
  if (scenario == "dynamics") {
    dynamics(ctx, sum);
  } else if (scenario == "error-rate") {
    error_rate(ctx, sum);
  } else if (scenario == "robustness") {
    robustness(ctx, sum);
  } else if (scenario == "fsr-sweep") {
    fsr_sweep(ctx, sum);
  } else if (scenario == "leakage-distribution") {
    leakage_distribution(ctx, sum);
  } else if (scenario == "optimize-frequencies") {
    optimize_frequencies(ctx, sum);
  } else {
    optimize_waveform(ctx, sum);
  }
  sum.params["scenario"] = scenario;
  sum.params["seed"] = ctx.seed;

  const json summary{{"gate", sum.gate},
                     {"duration_ns", sum.duration_ns},
                     {"loss", finite_or_null(sum.loss)},
                     {"leakage", finite_or_null(sum.leakage)},
                     {"fidelity", finite_or_null(sum.fidelity)},
                     {"params", sum.params},
                     {"runtime_s", std::chrono::duration<double>(Clock::now() - start).count()}};
  RunResult result;
  result.summary_json = summary.dump(2);
  if (config.write_json) {
    const auto path = ctx.dir / (scenario + "_summary.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
    out << result.summary_json << '\n';
    ctx.files.push_back(path.string());
  }
  result.files = ctx.files;
  return result;
}

std::string error_json(int code, const std::string& message) {
  static const char* names[] = {"ok", "invalid_argument", "parse", "numerical", "io", "unreachable", "fit_unreliable"};
  const std::string name = code >= 0 && code <= 6 ? names[code] : "internal";
  return json{{"error", {{"code", code}, {"name", name}, {"message", message}}}}.dump(2);
}

}  // namespace qlink::experiment
