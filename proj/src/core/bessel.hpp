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

#pragma once

namespace qlink::bessel {

/// Location of the first maximum of J1.
inline constexpr double kJ1FirstMaximum = 1.8411837813406593;
inline constexpr double kJ1MaximumValue = 0.5818652242815963;

/// Bessel function of the first kind J_n(x) for integer order and any real x.
double j(int order, double x);

/// Inverse of J1 on its first monotone branch [0, kJ1FirstMaximum].
double inverse_j1(double value);

}  // namespace qlink::bessel
