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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace qlink::config {

namespace {

struct Context {
  std::string section;
  std::string key;
  int line = 0;

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kParse, "line " + std::to_string(line) + ": [" + section + "] " + key + ": " + what);
  }
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const Context& c, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) c.error("expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const Context& c, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) c.error("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const Context& c, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  c.error("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const Context& c, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(c, trim(item)));
  if (out.empty()) c.error("expected a comma-separated list of numbers");
  return out;
}

double positive(const Context& c, double x) {
  if (!(x > 0.0)) c.error("must be positive");
  return x;
}

std::string fmt(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? ", " : "") + fmt(xs[k]);
  return out;
}

std::string fmt(bool b) { return b ? "true" : "false"; }

struct Entry {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const Context&, const std::string&)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <typename T>
std::optional<std::string> maybe(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return fmt(*v);
}

std::string expansion_name(device::Expansion e) { return e == device::Expansion::kExact ? "exact" : "jacobi-anger"; }
std::string frame_name(holonomic::Frame f) { return f == holonomic::Frame::kLab ? "lab" : "rotating"; }

using C = ExperimentConfig;

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    const auto add = [&](std::string s, std::string k, auto set, auto get) { t.push_back({s, k, set, get}); };
    // [device]
    for (int i = 0; i < 2; ++i) {
      add("device", "qubit" + std::to_string(i + 1) + "_ghz",
          [i](C& c, const Context& x, const std::string& v) { c.device.qubit_freq_ghz[i] = positive(x, to_double(x, v)); },
          [i](const C& c) -> std::optional<std::string> { return fmt(c.device.qubit_freq_ghz[i]); });
      add("device", "anharmonicity" + std::to_string(i + 1) + "_mhz",
          [i](C& c, const Context& x, const std::string& v) { c.device.anharmonicity_mhz[i] = to_double(x, v); },
          [i](const C& c) -> std::optional<std::string> { return fmt(c.device.anharmonicity_mhz[i]); });
    }
    add("device", "qubit_levels",
        [](C& c, const Context& x, const std::string& v) { c.device.qubit_levels = static_cast<int>(to_integer(x, v)); },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.device.qubit_levels); });
    add("device", "mode_freqs_ghz",
        [](C& c, const Context& x, const std::string& v) { c.device.mode_freqs_ghz = to_list(x, v); },
        [](const C& c) -> std::optional<std::string> {
          if (c.device.mode_freqs_ghz.empty()) return std::nullopt;
          return fmt(c.device.mode_freqs_ghz);
        });
    add("device", "target_mode",
        [](C& c, const Context& x, const std::string& v) {
          const auto k = to_integer(x, v);
          if (k < 0) x.error("must be non-negative");
          c.device.target_mode = static_cast<std::size_t>(k);
        },
        [](const C& c) -> std::optional<std::string> {
          if (!c.device.target_mode) return std::nullopt;
          return std::to_string(*c.device.target_mode);
        });
    add("device", "center_mode_ghz",
        [](C& c, const Context& x, const std::string& v) { c.device.center_mode_ghz = positive(x, to_double(x, v)); },
        [](const C& c) { return maybe(c.device.center_mode_ghz); });
    add("device", "fsr_mhz",
        [](C& c, const Context& x, const std::string& v) { c.device.fsr_mhz = positive(x, to_double(x, v)); },
        [](const C& c) { return maybe(c.device.fsr_mhz); });
    add("device", "length_cm",
        [](C& c, const Context& x, const std::string& v) { c.device.length_m = positive(x, to_double(x, v)) * 1e-2; },
        [](const C& c) -> std::optional<std::string> {
          if (!c.device.length_m) return std::nullopt;
          return fmt(*c.device.length_m * 1e2);
        });
    add("device", "mode_count",
        [](C& c, const Context& x, const std::string& v) { c.device.mode_count = static_cast<int>(to_integer(x, v)); },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.device.mode_count); });
    add("device", "velocity_m_per_s",
        [](C& c, const Context& x, const std::string& v) { c.device.velocity_m_per_s = positive(x, to_double(x, v)); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.device.velocity_m_per_s); });
    add("device", "g1_mhz", [](C& c, const Context& x, const std::string& v) { c.device.g1_mhz = to_list(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.device.g1_mhz); });
    add("device", "g2_mhz", [](C& c, const Context& x, const std::string& v) { c.device.g2_mhz = to_list(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.device.g2_mhz); });

    // [pulse]
    add("pulse", "envelope",
        [](C& c, const Context& x, const std::string& v) {
          try {
            c.envelope = pulse::parse_envelope_kind(v);
          } catch (const Error& e) {
            x.error(e.what());
          }
        },
        [](const C& c) -> std::optional<std::string> { return std::string(pulse::to_string(c.envelope)); });
    add("pulse", "sigma_fraction",
        [](C& c, const Context& x, const std::string& v) { c.sigma_fraction = positive(x, to_double(x, v)); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.sigma_fraction); });
    add("pulse", "knots", [](C& c, const Context& x, const std::string& v) { c.knots = to_list(x, v); },
        [](const C& c) -> std::optional<std::string> {
          if (c.knots.empty()) return std::nullopt;
          return fmt(c.knots);
        });
    add("pulse", "dt_ns", [](C& c, const Context& x, const std::string& v) { c.dt_ns = positive(x, to_double(x, v)); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.dt_ns); });
    add("pulse", "expansion",
        [](C& c, const Context& x, const std::string& v) {
          if (v == "exact") {
            c.expansion = device::Expansion::kExact;
          } else if (v == "jacobi-anger") {
            c.expansion = device::Expansion::kJacobiAnger;
          } else {
            x.error("expected exact or jacobi-anger");
          }
        },
        [](const C& c) -> std::optional<std::string> { return expansion_name(c.expansion); });
    add("pulse", "frame",
        [](C& c, const Context& x, const std::string& v) {
          if (v == "lab") {
            c.frame = holonomic::Frame::kLab;
          } else if (v == "rotating") {
            c.frame = holonomic::Frame::kRotating;
          } else {
            x.error("expected rotating or lab");
          }
        },
        [](const C& c) -> std::optional<std::string> { return frame_name(c.frame); });

    // [gate]
    add("gate", "target",
        [](C& c, const Context& x, const std::string& v) {
          try {
            c.gate = holonomic::parse_gate_label(v);
          } catch (const Error& e) {
            x.error(e.what());
          }
        },
        [](const C& c) -> std::optional<std::string> { return std::string(holonomic::to_string(c.gate)); });
    add("gate", "theta_rad", [](C& c, const Context& x, const std::string& v) { c.theta_rad = to_double(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.theta_rad); });
    add("gate", "phi_rad", [](C& c, const Context& x, const std::string& v) { c.phi_rad = to_double(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.phi_rad); });
    add("gate", "effective_avg_mhz",
        [](C& c, const Context& x, const std::string& v) { c.effective_avg_mhz = positive(x, to_double(x, v)); },
        [](const C& c) { return maybe(c.effective_avg_mhz); });
    add("gate", "g12_avg_mhz",
        [](C& c, const Context& x, const std::string& v) {
          c.g12_avg_mhz = to_double(x, v);
          if (*c.g12_avg_mhz < 0.0) x.error("must be non-negative");
        },
        [](const C& c) { return maybe(c.g12_avg_mhz); });
    add("gate", "g22_avg_mhz",
        [](C& c, const Context& x, const std::string& v) {
          c.g22_avg_mhz = to_double(x, v);
          if (*c.g22_avg_mhz < 0.0) x.error("must be non-negative");
        },
        [](const C& c) { return maybe(c.g22_avg_mhz); });
    for (int i = 0; i < 2; ++i) {
      add("gate", "delta" + std::to_string(i + 1) + "_mhz",
          [i](C& c, const Context& x, const std::string& v) { c.delta_mhz[i] = to_double(x, v); },
          [i](const C& c) -> std::optional<std::string> { return fmt(c.delta_mhz[i]); });
    }
    add("gate", "calibrate", [](C& c, const Context& x, const std::string& v) { c.calibrate = to_bool(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.calibrate); });

    // [noise]
    const auto time_entry = [&](std::string key, auto member) {
      add("noise", key,
          [member](C& c, const Context& x, const std::string& v) { c.noise.*member = positive(x, to_double(x, v)); },
          [member](const C& c) { return maybe(c.noise.*member); });
    };
    for (int i = 0; i < 2; ++i) {
      add("noise", "t1_q" + std::to_string(i + 1) + "_us",
          [i](C& c, const Context& x, const std::string& v) { c.noise.qubit_t1_us[i] = positive(x, to_double(x, v)); },
          [i](const C& c) { return maybe(c.noise.qubit_t1_us[i]); });
      add("noise", "tphi_q" + std::to_string(i + 1) + "_us",
          [i](C& c, const Context& x, const std::string& v) { c.noise.qubit_tphi_us[i] = positive(x, to_double(x, v)); },
          [i](const C& c) { return maybe(c.noise.qubit_tphi_us[i]); });
    }
    time_entry("t1_mode_us", &device::NoiseSpec::mode_t1_us);
    time_entry("tphi_mode_us", &device::NoiseSpec::mode_tphi_us);

    // [sweep]
    const auto real = [&](std::string s, std::string k, double C::*m) {
      add(s, k, [m](C& c, const Context& x, const std::string& v) { c.*m = to_double(x, v); },
          [m](const C& c) -> std::optional<std::string> { return fmt(c.*m); });
    };
    real("sweep", "detuning_min_mhz", &C::detuning_min_mhz);
    real("sweep", "detuning_max_mhz", &C::detuning_max_mhz);
    real("sweep", "detuning_step_mhz", &C::detuning_step_mhz);
    real("sweep", "reference_detuning_mhz", &C::reference_detuning_mhz);
    add("sweep", "fsr_list_mhz", [](C& c, const Context& x, const std::string& v) {
          c.fsr_list_mhz = to_list(x, v);
          for (double f : c.fsr_list_mhz) positive(x, f);
        },
        [](const C& c) -> std::optional<std::string> {
          if (c.fsr_list_mhz.empty()) return std::nullopt;
          return fmt(c.fsr_list_mhz);
        });
    add("sweep", "n_max",
        [](C& c, const Context& x, const std::string& v) {
          c.n_max = static_cast<int>(to_integer(x, v));
          if (c.n_max < 3) x.error("must be at least 3");
        },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.n_max); });
    add("sweep", "time_points",
        [](C& c, const Context& x, const std::string& v) {
          c.time_points = static_cast<int>(to_integer(x, v));
          if (c.time_points < 2) x.error("must be at least 2");
        },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.time_points); });

    // [optimizer]
    const auto adam = [&](std::string k, double optimize::AdamConfig::*m) {
      add("optimizer", k, [m](C& c, const Context& x, const std::string& v) { c.adam.*m = to_double(x, v); },
          [m](const C& c) -> std::optional<std::string> { return fmt(c.adam.*m); });
    };
    adam("learning_rate", &optimize::AdamConfig::learning_rate);
    adam("beta1", &optimize::AdamConfig::beta1);
    adam("beta2", &optimize::AdamConfig::beta2);
    adam("epsilon", &optimize::AdamConfig::epsilon);
    adam("tolerance", &optimize::AdamConfig::tolerance);
    adam("fd_step", &optimize::AdamConfig::fd_step);
    add("optimizer", "max_iterations",
        [](C& c, const Context& x, const std::string& v) {
          c.adam.max_iterations = static_cast<int>(to_integer(x, v));
          if (c.adam.max_iterations < 0) x.error("must be non-negative");
        },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.adam.max_iterations); });
    add("optimizer", "optimize_detuning",
        [](C& c, const Context& x, const std::string& v) { c.optimize_detuning = to_bool(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.optimize_detuning); });
    real("optimizer", "init_jitter", &C::init_jitter);
    add("optimizer", "coarse_step_mhz",
        [](C& c, const Context& x, const std::string& v) { c.grid.coarse_step_mhz = positive(x, to_double(x, v)); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.grid.coarse_step_mhz); });
    add("optimizer", "refine_steps_mhz",
        [](C& c, const Context& x, const std::string& v) { c.grid.refine_steps_mhz = to_list(x, v); },
        [](const C& c) -> std::optional<std::string> { return fmt(c.grid.refine_steps_mhz); });

    // [output]
    add("output", "directory", [](C& c, const Context&, const std::string& v) { c.directory = v; },
        [](const C& c) -> std::optional<std::string> { return c.directory; });
    add("output", "formats",
        [](C& c, const Context& x, const std::string& v) {
          c.write_csv = c.write_json = false;
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item == "csv") {
              c.write_csv = true;
            } else if (item == "json") {
              c.write_json = true;
            } else {
              x.error("unknown format '" + item + "'");
            }
          }
        },
        [](const C& c) -> std::optional<std::string> {
          std::string s = c.write_csv ? "csv" : "";
          if (c.write_json) s += s.empty() ? "json" : ", json";
          return s;
        });

    // [run]
    add("run", "seed",
        [](C& c, const Context& x, const std::string& v) {
          std::uint64_t out = 0;
          const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
          if (ec != std::errc() || p != v.data() + v.size()) x.error("expected an unsigned integer");
          c.seed = out;
        },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.seed); });
    add("run", "workers",
        [](C& c, const Context& x, const std::string& v) {
          c.workers = static_cast<int>(to_integer(x, v));
          if (c.workers < 1) x.error("must be at least 1");
        },
        [](const C& c) -> std::optional<std::string> { return std::to_string(c.workers); });
    return t;
  }();
  return table;
}

const std::vector<std::string> kSections{"device", "pulse", "gate", "noise", "sweep", "optimizer", "output", "run"};

}  // namespace

bool ExperimentConfig::has_section(const std::string& name) const {
  return std::find(sections.begin(), sections.end(), name) != sections.end();
}

device::DeviceSpec ExperimentConfig::build_device() const {
  device::RawDevice raw = device;
  if (raw.mode_freqs_ghz.empty() && !raw.center_mode_ghz) {
    if (raw.fsr_mhz || raw.length_m) {
      raw.center_mode_ghz = 5.83;
    } else {
      raw.mode_freqs_ghz = {6.36, 5.83, 5.38};
    }
  }
  return device::build_device(raw);
}

holonomic::GateTarget ExperimentConfig::target() const {
  switch (gate) {
    case holonomic::GateLabel::kSwap:
      return holonomic::GateTarget::swap();
    case holonomic::GateLabel::kSqrtSwap:
      return holonomic::GateTarget::sqrt_swap(phi_rad);
    case holonomic::GateLabel::kCustom:
      break;
  }
  return holonomic::GateTarget::custom(theta_rad, phi_rad);
}

pulse::Envelope ExperimentConfig::shape() const {
  switch (envelope) {
    case pulse::EnvelopeKind::kSquare:
      return pulse::Envelope::square(1.0, 1.0);
    case pulse::EnvelopeKind::kGaussian:
      return pulse::Envelope::gaussian(1.0, 1.0, sigma_fraction);
    case pulse::EnvelopeKind::kCosine:
      return pulse::Envelope::cosine(1.0, 1.0);
    case pulse::EnvelopeKind::kParameterized:
      break;
  }
  return pulse::Envelope::parameterized(1.0, 1.0, knots.empty() ? pulse::cosine_equivalent_knots() : knots);
}

std::array<double, 2> ExperimentConfig::averages_mhz() const {
  if (g12_avg_mhz || g22_avg_mhz) return {g12_avg_mhz.value_or(0.0), g22_avg_mhz.value_or(0.0)};
  return holonomic::target_averages(target(), effective_avg_mhz.value_or(10.10 * std::sqrt(2.0)));
}

holonomic::SimulationOptions ExperimentConfig::simulation() const {
  holonomic::SimulationOptions o;
  o.expansion = expansion;
  o.dt_ns = dt_ns;
  o.dressed = frame == holonomic::Frame::kLab;
  return o;
}

std::vector<double> ExperimentConfig::detuning_grid() const {
  require(detuning_step_mhz > 0.0 && detuning_max_mhz >= detuning_min_mhz, "invalid detuning grid");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((detuning_max_mhz - detuning_min_mhz) / detuning_step_mhz + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(detuning_min_mhz + k * detuning_step_mhz);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  Context ctx;
  std::istringstream in(text);
  std::string raw;
  std::vector<std::pair<std::string, std::string>> seen;
  bool noise_preset = false;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kParse, "line " + std::to_string(ctx.line) + ": malformed section header");
      ctx.section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), ctx.section) == kSections.end()) {
        fail(ErrorCode::kParse, "line " + std::to_string(ctx.line) + ": unknown section [" + ctx.section + "]");
      }
      if (c.has_section(ctx.section)) {
        fail(ErrorCode::kParse, "line " + std::to_string(ctx.line) + ": duplicate section [" + ctx.section + "]");
      }
      c.sections.push_back(ctx.section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, "line " + std::to_string(ctx.line) + ": expected key = value");
    ctx.key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (ctx.section.empty()) ctx.error("key outside of any section");
    if (std::find(seen.begin(), seen.end(), std::pair{ctx.section, ctx.key}) != seen.end()) ctx.error("duplicate key");
    seen.emplace_back(ctx.section, ctx.key);
    if (value.empty()) ctx.error("missing value");
    if (ctx.section == "noise" && ctx.key == "preset") {
      if (value == "default") {
        noise_preset = true;
      } else if (value != "none") {
        ctx.error("expected default or none");
      }
      continue;
    }
    const auto& table = entries();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Entry& e) { return e.section == ctx.section && e.key == ctx.key; });
    if (it == table.end()) ctx.error("unknown key");
    it->set(c, ctx, value);
  }
  for (const char* required : {"device", "gate"}) {
    if (!c.has_section(required)) fail(ErrorCode::kParse, std::string("missing required section [") + required + "]");
  }
  c.has_noise = c.has_section("noise");
  if (noise_preset) {
    const auto d = device::default_noise();
    for (int i = 0; i < 2; ++i) {
      if (!c.noise.qubit_t1_us[i]) c.noise.qubit_t1_us[i] = d.qubit_t1_us[i];
      if (!c.noise.qubit_tphi_us[i]) c.noise.qubit_tphi_us[i] = d.qubit_tphi_us[i];
    }
    if (!c.noise.mode_t1_us) c.noise.mode_t1_us = d.mode_t1_us;
    if (!c.noise.mode_tphi_us) c.noise.mode_tphi_us = d.mode_tphi_us;
  }

  // Whole-config validation; messages keep the section for orientation.
  const auto check = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      fail(ErrorCode::kParse, std::string("[") + section + "] " + e.what());
    }
  };
  check("device", [&] { c.build_device(); });
  check("gate", [&] { c.target().validate(); });
  check("noise", [&] { c.noise.validate(); });
  check("optimizer", [&] {
    c.adam.validate();
    c.grid.validate();
  });
  check("sweep", [&] { c.detuning_grid(); });
  if (c.envelope == pulse::EnvelopeKind::kParameterized && !c.knots.empty()) {
    check("pulse", [&] { c.shape(); });
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const auto& section : kSections) {
    if (section == "noise" && !config.has_noise) continue;
    out += "[" + section + "]\n";
    for (const auto& e : entries()) {
      if (e.section != section) continue;
      if (const auto v = e.get(config)) out += e.key + " = " + *v + "\n";
    }
    out += "\n";
  }
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return serialize(a) == serialize(b); }

}  // namespace qlink::config
