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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace qlink::pulse {

enum class EnvelopeKind { kSquare, kGaussian, kCosine, kParameterized };

std::string_view to_string(EnvelopeKind kind);
EnvelopeKind parse_envelope_kind(std::string_view name);

inline constexpr double kDefaultSigmaFraction = 1.0 / 6.0;
inline constexpr std::size_t kDefaultKnotCount = 16;

/// Flux-pulse amplitude envelope A(t) in MHz on [0, T].
///
/// A parameterized envelope is a monotone cubic (PCHIP) interpolant of its
/// knot values, scaled by `peak`. With `pinned` knots the curve is forced to
/// zero at both ends and the knots sit at interior positions k/(N+1);
/// otherwise the knots span [0, 1] inclusive.
class Envelope {
 public:
  static Envelope square(double duration_ns, double peak_mhz);
  static Envelope gaussian(double duration_ns, double peak_mhz, double sigma_fraction = kDefaultSigmaFraction);
  static Envelope cosine(double duration_ns, double peak_mhz);
  static Envelope parameterized(double duration_ns, double peak_mhz, std::vector<double> knots, bool pinned = true);

  EnvelopeKind kind() const { return kind_; }
  double duration() const { return duration_; }
  double peak() const { return peak_; }
  double sigma_fraction() const { return sigma_fraction_; }
  const std::vector<double>& knots() const { return knots_; }
  bool pinned() const { return pinned_; }

  /// A(t) in MHz; t must lie in [0, T].
  double sample(double t) const;
  /// Peak-normalized shape at u = t/T in [0, 1] (clamped).
  double shape(double u) const;
  /// Breakpoints of the shape on [0, 1] where derivatives may jump.
  std::vector<double> breakpoints() const;

  Envelope with_duration(double duration_ns) const;
  Envelope with_peak(double peak_mhz) const;
  Envelope with_knots(std::vector<double> knots) const;

 private:
  Envelope(EnvelopeKind kind, double duration, double peak);
  void build_interpolant();

  EnvelopeKind kind_;
  double duration_;
  double peak_;
  double sigma_fraction_ = kDefaultSigmaFraction;
  std::vector<double> knots_;
  bool pinned_ = true;
  // PCHIP nodes and slopes.
  std::vector<double> xs_, ys_, slopes_;
};

/// Knot values that reproduce the raised-cosine shape at the knot positions.
std::vector<double> cosine_equivalent_knots(std::size_t count = kDefaultKnotCount, bool pinned = true);

/// Gauss-Legendre nodes/weights on [0, 1], split at the envelope breakpoints.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature unit_quadrature(const Envelope& envelope, int panels = 64);

/// (1/T) * integral of J1(z * shape(t/T)) dt for modulation index z at the peak.
double mean_j1(const Envelope& envelope, double peak_index);

/// Peak modulation index z_max at which mean_j1 stops increasing.
double max_mean_index(const Envelope& envelope);

/// Solves mean_j1(envelope, z) = ratio for z on [0, max_mean_index]. Throws
/// kUnreachable when the ratio exceeds the reachable maximum.
double index_for_mean(const Envelope& envelope, double ratio);

/// Envelope average of the resonant effective coupling (MHz):
/// |g| * (1/T) * integral J1(A(t) / |detuning|) dt.
double envelope_average(const Envelope& envelope, double coupling_mhz, double detuning_mhz);

/// Gate duration (ns) from the envelope averages via the cyclic condition
/// with g_eff = sqrt(g12^2 + g22^2).
double gate_duration(double average12_mhz, double average22_mhz);

/// Parametric drive on one qubit: A(t - start) cos(modulation * t + phase) a^dag a,
/// switched off outside [start, start + T].
struct DriveSignal {
  int qubit = 0;
  Envelope envelope = Envelope::square(1.0, 0.0);
  double start_ns = 0.0;
  double modulation_mhz = 0.0;  // omega_Q - omega_M2 + detuning
  double detuning_mhz = 0.0;
  double phase_rad = 0.0;

  /// Envelope value at absolute time t (zero outside the pulse window).
  double amplitude(double t) const;
  double end_ns() const { return start_ns + envelope.duration(); }
};

}  // namespace qlink::pulse
