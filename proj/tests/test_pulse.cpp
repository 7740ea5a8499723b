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

#include "bessel.hpp"
#include "doctest.h"
#include "pulse.hpp"

using namespace qlink;
using namespace qlink::pulse;

TEST_CASE("Bessel values against the power series") {
  // J1(x) = sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)
  const double x = 0.1;
  double series = 0.0;
  double term = x / 2.0;
  for (int k = 0; k < 10; ++k) {
    series += term;
    term *= -(x * x / 4.0) / ((k + 1.0) * (k + 2.0));
  }
  CHECK(bessel::j(1, x) == doctest::Approx(series).epsilon(1e-14));
  CHECK(bessel::j(1, 0.1) == doctest::Approx(0.049938).epsilon(1e-5));
  CHECK(bessel::j(1, -0.7) == doctest::Approx(-bessel::j(1, 0.7)));
  CHECK(bessel::j(2, -0.7) == doctest::Approx(bessel::j(2, 0.7)));
  CHECK(bessel::inverse_j1(bessel::j(1, 1.2)) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_THROWS_AS(bessel::inverse_j1(0.6), Error);
}

TEST_CASE("envelope sampling") {
  const auto cosine = Envelope::cosine(40.0, 80.0);
  CHECK(cosine.sample(20.0) == doctest::Approx(80.0));
  CHECK(cosine.sample(0.0) == doctest::Approx(0.0));
  CHECK(cosine.sample(10.0) == doctest::Approx(40.0));
  const auto square = Envelope::square(40.0, 80.0);
  CHECK(square.sample(0.0) == doctest::Approx(80.0));
  CHECK(square.sample(33.0) == doctest::Approx(80.0));
  const auto gauss = Envelope::gaussian(40.0, 80.0);
  CHECK(gauss.sample(20.0) == doctest::Approx(80.0));
  CHECK(std::abs(gauss.sample(0.0)) < 1e-12);
  CHECK(std::abs(gauss.sample(40.0)) < 1e-12);
  CHECK_THROWS_AS(cosine.sample(-1.0), Error);
  CHECK_THROWS_AS(cosine.sample(41.0), Error);
  CHECK(parse_envelope_kind("gaussian") == EnvelopeKind::kGaussian);
  CHECK_THROWS_AS(parse_envelope_kind("sinc"), Error);
}

TEST_CASE("parameterized envelopes") {
  const auto knots = cosine_equivalent_knots();
  CHECK(knots.size() == 16);
  const auto env = Envelope::parameterized(50.0, 60.0, knots);
  CHECK(env.sample(0.0) == doctest::Approx(0.0));
  CHECK(env.sample(50.0) == doctest::Approx(0.0));
  // Interpolates the cosine closely between knots.
  const auto cosine = Envelope::cosine(50.0, 60.0);
  for (double t = 0.0; t <= 50.0; t += 1.7) {
    CHECK(std::abs(env.sample(t) - cosine.sample(t)) < 0.6);
    CHECK(env.sample(t) >= 0.0);
  }
  // Equal unpinned knots reproduce the square envelope average.
  const auto flat = Envelope::parameterized(50.0, 60.0, std::vector<double>(16, 1.0), false);
  const auto square = Envelope::square(50.0, 60.0);
  CHECK(envelope_average(flat, 30.0, 250.0) == doctest::Approx(envelope_average(square, 30.0, 250.0)).epsilon(1e-3));
}

TEST_CASE("envelope averages and gate duration") {
  const auto square = Envelope::square(30.0, 25.0);
  CHECK(envelope_average(square, 30.0, 250.0) == doctest::Approx(30.0 * bessel::j(1, 0.1)).epsilon(1e-12));
  CHECK(gate_duration(10.10, 10.10) == doctest::Approx(35.0).epsilon(0.1 / 35.0));
  CHECK(gate_duration(4.16, 10.04) == doctest::Approx(46.0).epsilon(0.1 / 46.0));
  CHECK(gate_duration(0.0, 10.0) == doctest::Approx(50.0));
  CHECK_THROWS_AS(gate_duration(0.0, 0.0), Error);
  CHECK_THROWS_AS(envelope_average(square, 30.0, 0.0), Error);

  // Solving for the peak index and recomputing the average round-trips.
  const auto cosine = Envelope::cosine(35.0, 1.0);
  for (double ratio : {0.05, 0.2, 0.33}) {
    const double z = index_for_mean(cosine, ratio);
    CHECK(mean_j1(cosine, z) == doctest::Approx(ratio).epsilon(1e-4));
  }
  CHECK_THROWS_AS(index_for_mean(cosine, 0.45), Error);
}

TEST_CASE("drive window") {
  DriveSignal d;
  d.envelope = Envelope::cosine(20.0, 10.0);
  d.start_ns = 5.0;
  CHECK(d.amplitude(4.0) == 0.0);
  CHECK(d.amplitude(15.0) == doctest::Approx(10.0));
  CHECK(d.amplitude(26.0) == 0.0);
  CHECK(d.end_ns() == doctest::Approx(25.0));
}
