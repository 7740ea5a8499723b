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

#ifndef QLINK_QLINK_H_
#define QLINK_QLINK_H_

/* C interface to the qlink simulator. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Functions
 * return a status code; on failure qlink_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QLINK_API __declspec(dllexport)
#else
#define QLINK_API __attribute__((visibility("default")))
#endif

typedef enum qlink_status {
  QLINK_OK = 0,
  QLINK_INVALID_ARGUMENT = 1,
  QLINK_PARSE = 2,
  QLINK_NUMERICAL = 3,
  QLINK_IO = 4,
  QLINK_UNREACHABLE = 5,
  QLINK_FIT_UNRELIABLE = 6,
  QLINK_INTERNAL = 99
} qlink_status;

typedef struct qlink_config qlink_config;
typedef struct qlink_result qlink_result;
typedef struct qlink_device qlink_device;
typedef struct qlink_schedule qlink_schedule;

QLINK_API const char* qlink_version(void);
QLINK_API const char* qlink_last_error(void);
QLINK_API const char* qlink_status_name(qlink_status status);

/* Strings returned through char** are heap-allocated; free with qlink_string_free. */
QLINK_API void qlink_string_free(char* text);

/* ---- configuration and experiments ---- */
QLINK_API qlink_status qlink_config_parse(const char* text, qlink_config** out);
QLINK_API qlink_status qlink_config_load(const char* path, qlink_config** out);
QLINK_API qlink_status qlink_config_serialize(const qlink_config* config, char** out);
QLINK_API const char* qlink_config_output_dir(const qlink_config* config);
QLINK_API void qlink_config_free(qlink_config* config);

QLINK_API size_t qlink_scenario_count(void);
QLINK_API const char* qlink_scenario_name(size_t index);

/* Runs one scenario. out_dir may be NULL (config value); seed and workers
 * override the config when has_seed / workers > 0. */
QLINK_API qlink_status qlink_run(const qlink_config* config, const char* scenario, const char* out_dir,
                                 int has_seed, uint64_t seed, int workers, qlink_result** out);
QLINK_API const char* qlink_result_summary(const qlink_result* result);
QLINK_API size_t qlink_result_file_count(const qlink_result* result);
QLINK_API const char* qlink_result_file(const qlink_result* result, size_t index);
QLINK_API void qlink_result_free(qlink_result* result);

/* JSON error record {"error": {"code", "name", "message"}}. */
QLINK_API char* qlink_error_json(qlink_status status, const char* message);

/* ---- direct simulation ---- */
QLINK_API qlink_status qlink_device_paper(qlink_device** out);
QLINK_API qlink_status qlink_device_ladder(double fsr_mhz, int mode_count, qlink_device** out);
QLINK_API qlink_status qlink_device_from_config(const qlink_config* config, qlink_device** out);
QLINK_API size_t qlink_device_mode_count(const qlink_device* device);
QLINK_API void qlink_device_free(qlink_device* device);

/* gate: "swap", "sqrt_swap"; envelope: "cosine", "gaussian", "square". */
QLINK_API qlink_status qlink_synthesize(const qlink_device* device, const char* gate, const char* envelope,
                                        double average12_mhz, double average22_mhz, qlink_schedule** out);
QLINK_API qlink_status qlink_schedule_duration(const qlink_schedule* schedule, double* duration_ns);
QLINK_API void qlink_schedule_free(qlink_schedule* schedule);

/* Closed-system final populations from |10> in the order Q1, Q2, modes.
 * `count` receives the number written (2 + modes); capacity must suffice. */
QLINK_API qlink_status qlink_final_populations(const qlink_device* device, const qlink_schedule* schedule,
                                               double* populations, size_t capacity, size_t* count);

QLINK_API qlink_status qlink_gate_duration(double average12_mhz, double average22_mhz, double* duration_ns);
QLINK_API qlink_status qlink_coupling_ratio(double theta, double phi, double* real, double* imag);

#ifdef __cplusplus
}
#endif

#endif /* QLINK_QLINK_H_ */
