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

// Exercises the shared library through its C header only.
#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "qlink/qlink.h"

TEST_CASE("config handles and error codes") {
  qlink_config* cfg = nullptr;
  CHECK(qlink_config_parse("[device]\n[gate]\nbogus = 1\n", &cfg) == QLINK_PARSE);
  CHECK(cfg == nullptr);
  CHECK(std::string(qlink_last_error()).find("bogus") != std::string::npos);
  CHECK(qlink_config_load("/definitely/not/here.ini", &cfg) == QLINK_IO);
  CHECK(qlink_config_parse(nullptr, &cfg) == QLINK_INVALID_ARGUMENT);

  REQUIRE(qlink_config_parse("[device]\n[gate]\ng12_avg_mhz = 10.1\ng22_avg_mhz = 10.1\n", &cfg) == QLINK_OK);
  char* text = nullptr;
  REQUIRE(qlink_config_serialize(cfg, &text) == QLINK_OK);
  qlink_config* again = nullptr;
  CHECK(qlink_config_parse(text, &again) == QLINK_OK);
  qlink_string_free(text);
  qlink_config_free(again);

  qlink_device* dev = nullptr;
  REQUIRE(qlink_device_from_config(cfg, &dev) == QLINK_OK);
  CHECK(qlink_device_mode_count(dev) == 3);
  qlink_device_free(dev);
  qlink_config_free(cfg);

  char* record = qlink_error_json(QLINK_FIT_UNRELIABLE, "too few points");
  CHECK(std::string(record).find("fit_unreliable") != std::string::npos);
  qlink_string_free(record);
  CHECK(std::strcmp(qlink_status_name(QLINK_NUMERICAL), "numerical") == 0);
  CHECK(qlink_scenario_count() == 7);
  CHECK(qlink_scenario_name(99) == nullptr);
}

TEST_CASE("synthesis and simulation through the C API") {
  qlink_device* dev = nullptr;
  REQUIRE(qlink_device_paper(&dev) == QLINK_OK);
  qlink_schedule* s = nullptr;
  REQUIRE(qlink_synthesize(dev, "swap", "cosine", 10.10, 10.10, &s) == QLINK_OK);
  double t = 0.0;
  CHECK(qlink_schedule_duration(s, &t) == QLINK_OK);
  CHECK(t == doctest::Approx(35.0).epsilon(0.2 / 35.0));
  double pops[8];
  size_t n = 0;
  CHECK(qlink_final_populations(dev, s, pops, 1, &n) == QLINK_INVALID_ARGUMENT);
  REQUIRE(qlink_final_populations(dev, s, pops, 8, &n) == QLINK_OK);
  CHECK(n == 5);
  CHECK(pops[1] > 0.99);
  qlink_schedule_free(s);
  CHECK(qlink_synthesize(dev, "swap", "cosine", 30.0, 10.0, &s) == QLINK_UNREACHABLE);
  CHECK(qlink_synthesize(dev, "cnot", "cosine", 5.0, 5.0, &s) == QLINK_INVALID_ARGUMENT);
  qlink_device_free(dev);

  double re = 0.0, im = 0.0;
  REQUIRE(qlink_coupling_ratio(M_PI / 4.0, M_PI, &re, &im) == QLINK_OK);
  CHECK(re == doctest::Approx(0.41421).epsilon(1e-4));
  CHECK(qlink_gate_duration(0.0, 0.0, &t) == QLINK_INVALID_ARGUMENT);
  CHECK(qlink_device_ladder(-5.0, 5, &dev) == QLINK_INVALID_ARGUMENT);
}
