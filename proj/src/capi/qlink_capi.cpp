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

#include "qlink/qlink.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "config.hpp"
#include "experiment.hpp"
#include "holonomic.hpp"

struct qlink_config {
  qlink::config::ExperimentConfig value;
};

struct qlink_result {
  qlink::experiment::RunResult value;
};

struct qlink_device {
  qlink::device::DeviceSpec value;
};

struct qlink_schedule {
  qlink::holonomic::GateSchedule value;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
qlink_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return QLINK_OK;
  } catch (const qlink::Error& e) {
    last_error = e.what();
    return static_cast<qlink_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return QLINK_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) qlink::fail(qlink::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* qlink_version(void) { return "0.1.0"; }
const char* qlink_last_error(void) { return last_error.c_str(); }

const char* qlink_status_name(qlink_status status) {
  switch (status) {
    case QLINK_OK: return "ok";
    case QLINK_INVALID_ARGUMENT: return "invalid_argument";
    case QLINK_PARSE: return "parse";
    case QLINK_NUMERICAL: return "numerical";
    case QLINK_IO: return "io";
    case QLINK_UNREACHABLE: return "unreachable";
    case QLINK_FIT_UNRELIABLE: return "fit_unreliable";
    case QLINK_INTERNAL: break;
  }
  return "internal";
}

void qlink_string_free(char* text) { std::free(text); }

qlink_status qlink_config_parse(const char* text, qlink_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new qlink_config{qlink::config::parse_config(text)};
  });
}

qlink_status qlink_config_load(const char* path, qlink_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new qlink_config{qlink::config::load_config(path)};
  });
}

qlink_status qlink_config_serialize(const qlink_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = duplicate(qlink::config::serialize(config->value));
  });
}

const char* qlink_config_output_dir(const qlink_config* config) {
  return config ? config->value.directory.c_str() : nullptr;
}

void qlink_config_free(qlink_config* config) { delete config; }

size_t qlink_scenario_count(void) { return qlink::experiment::scenario_names().size(); }

const char* qlink_scenario_name(size_t index) {
  const auto& names = qlink::experiment::scenario_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

qlink_status qlink_run(const qlink_config* config, const char* scenario, const char* out_dir, int has_seed,
                       uint64_t seed, int workers, qlink_result** out) {
  return guarded([&] {
    need(config, "config");
    need(scenario, "scenario");
    need(out, "out");
    qlink::experiment::RunOptions options;
    if (out_dir) options.out_dir = out_dir;
    if (has_seed) options.seed = seed;
    if (workers > 0) options.workers = workers;
    *out = new qlink_result{qlink::experiment::run_experiment(config->value, scenario, options)};
  });
}

const char* qlink_result_summary(const qlink_result* result) {
  return result ? result->value.summary_json.c_str() : nullptr;
}

size_t qlink_result_file_count(const qlink_result* result) { return result ? result->value.files.size() : 0; }

const char* qlink_result_file(const qlink_result* result, size_t index) {
  if (!result || index >= result->value.files.size()) return nullptr;
  return result->value.files[index].c_str();
}

void qlink_result_free(qlink_result* result) { delete result; }

char* qlink_error_json(qlink_status status, const char* message) {
  try {
    return duplicate(qlink::experiment::error_json(static_cast<int>(status), message ? message : ""));
  } catch (...) {
    return nullptr;
  }
}

qlink_status qlink_device_paper(qlink_device** out) {
  return guarded([&] {
    need(out, "out");
    *out = new qlink_device{qlink::device::paper_device()};
  });
}

qlink_status qlink_device_ladder(double fsr_mhz, int mode_count, qlink_device** out) {
  return guarded([&] {
    need(out, "out");
    *out = new qlink_device{qlink::device::ladder_device(fsr_mhz, mode_count)};
  });
}

qlink_status qlink_device_from_config(const qlink_config* config, qlink_device** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = new qlink_device{config->value.build_device()};
  });
}

size_t qlink_device_mode_count(const qlink_device* device) { return device ? device->value.modes() : 0; }

void qlink_device_free(qlink_device* device) { delete device; }

qlink_status qlink_synthesize(const qlink_device* device, const char* gate, const char* envelope,
                              double average12_mhz, double average22_mhz, qlink_schedule** out) {
  return guarded([&] {
    need(device, "device");
    need(gate, "gate");
    need(envelope, "envelope");
    need(out, "out");
    const auto label = qlink::holonomic::parse_gate_label(gate);
    qlink::holonomic::GateTarget target = qlink::holonomic::GateTarget::swap();
    if (label == qlink::holonomic::GateLabel::kSqrtSwap) {
      target = qlink::holonomic::GateTarget::sqrt_swap();
    } else if (label != qlink::holonomic::GateLabel::kSwap) {
      qlink::fail(qlink::ErrorCode::kInvalidArgument, "custom gates need a config file");
    }
    qlink::pulse::Envelope shape = qlink::pulse::Envelope::cosine(1.0, 1.0);
    switch (qlink::pulse::parse_envelope_kind(envelope)) {
      case qlink::pulse::EnvelopeKind::kSquare: shape = qlink::pulse::Envelope::square(1.0, 1.0); break;
      case qlink::pulse::EnvelopeKind::kGaussian: shape = qlink::pulse::Envelope::gaussian(1.0, 1.0); break;
      case qlink::pulse::EnvelopeKind::kCosine: break;
      case qlink::pulse::EnvelopeKind::kParameterized:
        qlink::fail(qlink::ErrorCode::kInvalidArgument, "parameterized envelopes need a config file");
    }
    *out = new qlink_schedule{
        qlink::holonomic::synthesize_drives(device->value, target, shape, {average12_mhz, average22_mhz})};
  });
}

qlink_status qlink_schedule_duration(const qlink_schedule* schedule, double* duration_ns) {
  return guarded([&] {
    need(schedule, "schedule");
    need(duration_ns, "duration_ns");
    *duration_ns = schedule->value.duration_ns;
  });
}

void qlink_schedule_free(qlink_schedule* schedule) { delete schedule; }

qlink_status qlink_final_populations(const qlink_device* device, const qlink_schedule* schedule,
                                     double* populations, size_t capacity, size_t* count) {
  return guarded([&] {
    need(device, "device");
    need(schedule, "schedule");
    need(populations, "populations");
    const auto psi = qlink::holonomic::run_from_10(device->value, schedule->value);
    const auto n = static_cast<size_t>(psi.size());
    if (count) *count = n;
    if (capacity < n) qlink::fail(qlink::ErrorCode::kInvalidArgument, "population buffer too small");
    for (size_t k = 0; k < n; ++k) populations[k] = std::norm(psi(static_cast<Eigen::Index>(k)));
  });
}

qlink_status qlink_gate_duration(double average12_mhz, double average22_mhz, double* duration_ns) {
  return guarded([&] {
    need(duration_ns, "duration_ns");
    *duration_ns = qlink::pulse::gate_duration(average12_mhz, average22_mhz);
  });
}

qlink_status qlink_coupling_ratio(double theta, double phi, double* real, double* imag) {
  return guarded([&] {
    need(real, "real");
    need(imag, "imag");
    const auto r = qlink::holonomic::coupling_ratio(qlink::holonomic::GateTarget::custom(theta, phi));
    *real = r.real();
    *imag = r.imag();
  });
}

}  // extern "C"
