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

#include "pulse.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bessel.hpp"

namespace qlink::pulse {
namespace {

constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

constexpr double kBoundarySlack = 1e-9;

std::vector<double> shape_samples(const Envelope& envelope, const Quadrature& q) {
  std::vector<double> s(q.nodes.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = envelope.shape(q.nodes[k]);
  return s;
}

double mean_j1_from(const std::vector<double>& shape, const std::vector<double>& weights, double z) {
  double acc = 0.0;
  for (std::size_t k = 0; k < shape.size(); ++k) acc += weights[k] * std::cyl_bessel_j(1.0, z * shape[k]);
  return acc;
}

}  // namespace

std::string_view to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::kSquare: return "square";
    case EnvelopeKind::kGaussian: return "gaussian";
    case EnvelopeKind::kCosine: return "cosine";
    case EnvelopeKind::kParameterized: return "parameterized";
  }
  return "unknown";
}

EnvelopeKind parse_envelope_kind(std::string_view name) {
  if (name == "square") return EnvelopeKind::kSquare;
  if (name == "gaussian") return EnvelopeKind::kGaussian;
  if (name == "cosine") return EnvelopeKind::kCosine;
  if (name == "parameterized") return EnvelopeKind::kParameterized;
  fail(ErrorCode::kInvalidArgument, "unknown envelope kind '" + std::string(name) + "'");
}

Envelope::Envelope(EnvelopeKind kind, double duration, double peak) : kind_(kind), duration_(duration), peak_(peak) {
  require(std::isfinite(duration) && duration > 0.0, "envelope duration must be positive");
  require(std::isfinite(peak) && peak >= 0.0, "envelope peak amplitude must be non-negative");
}

Envelope Envelope::square(double duration_ns, double peak_mhz) {
  return Envelope(EnvelopeKind::kSquare, duration_ns, peak_mhz);
}

Envelope Envelope::gaussian(double duration_ns, double peak_mhz, double sigma_fraction) {
  require(sigma_fraction > 0.0 && sigma_fraction <= 1.0, "gaussian sigma fraction must be in (0, 1]");
  Envelope e(EnvelopeKind::kGaussian, duration_ns, peak_mhz);
  e.sigma_fraction_ = sigma_fraction;
  return e;
}

Envelope Envelope::cosine(double duration_ns, double peak_mhz) {
  return Envelope(EnvelopeKind::kCosine, duration_ns, peak_mhz);
}

Envelope Envelope::parameterized(double duration_ns, double peak_mhz, std::vector<double> knots, bool pinned) {
  require(knots.size() >= 2, "parameterized envelope needs at least two knots");
  for (double k : knots) require(std::isfinite(k) && k >= 0.0, "knot values must be finite and non-negative");
  Envelope e(EnvelopeKind::kParameterized, duration_ns, peak_mhz);
  e.knots_ = std::move(knots);
  e.pinned_ = pinned;
  e.build_interpolant();
  return e;
}

void Envelope::build_interpolant() {
  const std::size_t n = knots_.size();
  xs_.clear();
  ys_.clear();
  if (pinned_) {
    xs_.push_back(0.0);
    ys_.push_back(0.0);
    for (std::size_t k = 0; k < n; ++k) {
      xs_.push_back(static_cast<double>(k + 1) / static_cast<double>(n + 1));
      ys_.push_back(knots_[k]);
    }
    xs_.push_back(1.0);
    ys_.push_back(0.0);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      xs_.push_back(static_cast<double>(k) / static_cast<double>(n - 1));
      ys_.push_back(knots_[k]);
    }
  }
  // Fritsch-Carlson monotone slopes.
  const std::size_t m = xs_.size();
  std::vector<double> delta(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) delta[k] = (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
  slopes_.assign(m, 0.0);
  slopes_.front() = delta.front();
  slopes_.back() = delta.back();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      slopes_[k] = 0.0;
    } else {
      const double h0 = xs_[k] - xs_[k - 1];
      const double h1 = xs_[k + 1] - xs_[k];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      slopes_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  // End slopes: keep the one-sided secant but respect monotonicity.
  for (std::size_t k : {std::size_t{0}, m - 1}) {
    const double d = k == 0 ? delta.front() : delta.back();
    if (slopes_[k] * d <= 0.0) slopes_[k] = 0.0;
    if (std::abs(slopes_[k]) > 3.0 * std::abs(d)) slopes_[k] = 3.0 * d;
  }
}

double Envelope::shape(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  switch (kind_) {
    case EnvelopeKind::kSquare:
      return 1.0;
    case EnvelopeKind::kCosine:
      return 0.5 * (1.0 - std::cos(kTwoPi * u));
    case EnvelopeKind::kGaussian: {
      const double s = sigma_fraction_;
      const double edge = std::exp(-0.25 / (2.0 * s * s));
      const double g = std::exp(-(u - 0.5) * (u - 0.5) / (2.0 * s * s));
      return std::max(0.0, (g - edge) / (1.0 - edge));
    }
    case EnvelopeKind::kParameterized: {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
      std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
      k = std::min(k, xs_.size() - 2);
      const double h = xs_[k + 1] - xs_[k];
      const double t = (u - xs_[k]) / h;
      const double t2 = t * t;
      const double t3 = t2 * t;
      const double v = (2 * t3 - 3 * t2 + 1) * ys_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
                       (-2 * t3 + 3 * t2) * ys_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
      return std::max(0.0, v);
    }
  }
  return 0.0;
}

double Envelope::sample(double t) const {
  if (!(t >= -kBoundarySlack && t <= duration_ + kBoundarySlack)) {
    fail(ErrorCode::kInvalidArgument, "envelope sampled outside [0, T]: t = " + std::to_string(t));
  }
  return peak_ * shape(t / duration_);
}

std::vector<double> Envelope::breakpoints() const {
  if (kind_ == EnvelopeKind::kParameterized) return xs_;
  return {0.0, 1.0};
}

Envelope Envelope::with_duration(double duration_ns) const {
  require(std::isfinite(duration_ns) && duration_ns > 0.0, "envelope duration must be positive");
  Envelope e = *this;
  e.duration_ = duration_ns;
  return e;
}

Envelope Envelope::with_peak(double peak_mhz) const {
  require(std::isfinite(peak_mhz) && peak_mhz >= 0.0, "envelope peak amplitude must be non-negative");
  Envelope e = *this;
  e.peak_ = peak_mhz;
  return e;
}

Envelope Envelope::with_knots(std::vector<double> knots) const {
  require(kind_ == EnvelopeKind::kParameterized, "only parameterized envelopes have knots");
  return parameterized(duration_, peak_, std::move(knots), pinned_);
}

std::vector<double> cosine_equivalent_knots(std::size_t count, bool pinned) {
  require(count >= 2, "need at least two knots");
  std::vector<double> knots(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = pinned ? static_cast<double>(k + 1) / static_cast<double>(count + 1)
                            : static_cast<double>(k) / static_cast<double>(count - 1);
    knots[k] = 0.5 * (1.0 - std::cos(kTwoPi * u));
  }
  return knots;
}

Quadrature unit_quadrature(const Envelope& envelope, int panels) {
  const std::vector<double> breaks = envelope.breakpoints();
  const int segments = static_cast<int>(breaks.size()) - 1;
  const int per_segment = std::max(1, panels / segments);
  Quadrature q;
  q.nodes.reserve(static_cast<std::size_t>(segments * per_segment) * kGlNodes.size());
  q.weights.reserve(q.nodes.capacity());
  for (int s = 0; s < segments; ++s) {
    const double a = breaks[s];
    const double w = (breaks[s + 1] - a) / per_segment;
    for (int p = 0; p < per_segment; ++p) {
      const double mid = a + (p + 0.5) * w;
      for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        q.nodes.push_back(mid + 0.5 * w * kGlNodes[k]);
        q.weights.push_back(0.5 * w * kGlWeights[k]);
      }
    }
  }
  return q;
}

double mean_j1(const Envelope& envelope, double peak_index) {
  const Quadrature q = unit_quadrature(envelope);
  return mean_j1_from(shape_samples(envelope, q), q.weights, peak_index);
}

double max_mean_index(const Envelope& envelope) {
  const Quadrature q = unit_quadrature(envelope);
  const std::vector<double> s = shape_samples(envelope, q);
  // Golden-section search; the mean is unimodal below the first zero of J1
  // scaled by the smallest relevant shape value.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0;
  double b = 3.8317059702075125 / std::max(1e-3, *std::max_element(s.begin(), s.end())) * 1.5;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = mean_j1_from(s, q.weights, c);
  double fd = mean_j1_from(s, q.weights, d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = mean_j1_from(s, q.weights, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = mean_j1_from(s, q.weights, d);
    }
  }
  return 0.5 * (a + b);
}

double index_for_mean(const Envelope& envelope, double ratio) {
  require(std::isfinite(ratio) && ratio >= 0.0, "target coupling ratio must be non-negative");
  if (ratio == 0.0) return 0.0;
  const Quadrature q = unit_quadrature(envelope);
  const std::vector<double> s = shape_samples(envelope, q);
  const double z_max = max_mean_index(envelope);
  const double reachable = mean_j1_from(s, q.weights, z_max);
  if (ratio > reachable) {
    fail(ErrorCode::kUnreachable, "requested envelope average (" + std::to_string(ratio) +
                                      " of the bare coupling) exceeds the reachable maximum " +
                                      std::to_string(reachable) + " for a " +
                                      std::string(to_string(envelope.kind())) + " envelope");
  }
  double lo = 0.0;
  double hi = z_max;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_j1_from(s, q.weights, mid) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double envelope_average(const Envelope& envelope, double coupling_mhz, double detuning_mhz) {
  require(std::abs(detuning_mhz) > 0.0, "qubit-mode detuning must be non-zero");
  return std::abs(coupling_mhz) * mean_j1(envelope, envelope.peak() / std::abs(detuning_mhz));
}

double gate_duration(double average12_mhz, double average22_mhz) {
  const double g_eff = std::hypot(average12_mhz, average22_mhz);
  require(g_eff > 0.0, "at least one envelope average must be positive");
  // Cyclic condition 2*pi * g_eff * T = pi, with g_eff in MHz and T in ns.
  return 1e3 / (2.0 * g_eff);
}

double DriveSignal::amplitude(double t) const {
  const double local = t - start_ns;
  if (local < -kBoundarySlack || local > envelope.duration() + kBoundarySlack) return 0.0;
  return envelope.peak() * envelope.shape(local / envelope.duration());
}

}  // namespace qlink::pulse
