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

#include "bessel.hpp"

#include <cmath>

#include "common.hpp"

namespace qlink::bessel {

double j(int order, double x) {
  if (order < 0) return (order % 2 == 0 ? 1.0 : -1.0) * j(-order, x);
  if (x < 0.0) return (order % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(static_cast<double>(order), -x);
  return std::cyl_bessel_j(static_cast<double>(order), x);
}

double inverse_j1(double value) {
  if (!(value >= 0.0) || value > kJ1MaximumValue) {
    fail(ErrorCode::kUnreachable, "J1 inversion out of range: " + std::to_string(value));
  }
  double lo = 0.0;
  double hi = kJ1FirstMaximum;
  // J1 is increasing on [0, first maximum]; bisection is enough at 60 halvings.
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::cyl_bessel_j(1.0, mid) < value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qlink::bessel
