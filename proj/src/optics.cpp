/* Copyright 2026 The fogsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fogsim/optics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::uint64_t fnv1a(std::uint64_t hash, std::uint64_t word) {
  for (int byte = 0; byte < 8; ++byte) {
    hash ^= (word >> (8 * byte)) & 0xffu;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void check_subintervals(std::uint32_t n) {
  if (n < 2 || n % 2 != 0) {
    std::ostringstream msg;
    msg << "Simpson subinterval count must be even and >= 2, got " << n;
    fail(ErrorKind::InvalidArgument, msg.str());
  }
}

template <typename F>
double simpson(const F& f, double a, double b, std::uint32_t n) {
  const double h = (b - a) / n;
  double odd = 0.0;
  double even = 0.0;
  for (std::uint32_t k = 1; k < n; ++k) {
    const double v = f(a + k * h);
    if (k % 2 == 1)
      odd += v;
    else
      even += v;
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

// Integrates the soft integrand over [t_lo, t_hi] where t_hi is the end of
// the pulse or the moment the slant range reaches r1, whichever is first.
double integrate_window(double r, double t_lo, const FogParams& fog, const SensorModel& sensor,
                        std::uint32_t n) {
  const double c = SensorModel::c;
  const double t_hi = std::min(2.0 * sensor.tau_h, 2.0 * (r - sensor.r1) / c);
  if (!(t_hi > t_lo)) return 0.0;

  auto f = [&](double t) { return soft_integrand(t, r, fog, sensor); };
  const double t_ramp = 2.0 * (r - sensor.r2) / c;
  if (t_ramp > t_lo && t_ramp < t_hi)
    return simpson(f, t_lo, t_ramp, n) + simpson(f, t_ramp, t_hi, n);
  return simpson(f, t_lo, t_hi, n);
}

}  // namespace

void SensorModel::validate() const {
  std::ostringstream msg;
  if (!finite_positive(tau_h)) msg << "tau_h must be > 0; ";
  if (!finite_positive(r1) || !(r1 < r2)) msg << "need 0 < r1 < r2; ";
  if (!(r2 < 2.0)) msg << "r2 must be below 2 m; ";
  if (!finite_positive(range_step)) msg << "range_step must be > 0; ";
  if (!std::isfinite(max_range) || !(max_range > r2)) msg << "max_range must exceed r2; ";
  if (subintervals < 2 || subintervals % 2 != 0) msg << "subintervals must be even and >= 2; ";
  const auto problems = msg.str();
  if (!problems.empty())
    fail(ErrorKind::InvalidArgument, "invalid sensor model: " + problems.substr(0, problems.size() - 2));
}

std::uint64_t SensorModel::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : {tau_h, r1, r2, c, range_step, max_range})
    h = fnv1a(h, std::bit_cast<std::uint64_t>(v));
  return fnv1a(h, subintervals);
}

void FogParams::validate() const {
  std::ostringstream msg;
  if (!std::isfinite(alpha) || alpha < 0.0) msg << "alpha must be >= 0; ";
  if (!std::isfinite(beta) || beta < 0.0) msg << "beta must be >= 0; ";
  if (!(beta_0 > 0.0 && beta_0 <= 1.0 / kPi)) msg << "beta_0 must lie in (0, 1/pi]; ";
  if (mor) {
    if (!(*mor > 0.0)) {
      msg << "mor must be > 0; ";
    } else if (alpha > 0.0) {
      const double expected = 3.0 / alpha;
      if (std::abs(*mor - expected) > 0.05 * expected) msg << "mor inconsistent with alpha; ";
    } else if (!std::isinf(*mor)) {
      msg << "mor must be infinite for alpha = 0; ";
    }
  }
  const auto problems = msg.str();
  if (!problems.empty())
    fail(ErrorKind::InvalidArgument, "invalid fog parameters: " + problems.substr(0, problems.size() - 2));
}

PulseEnergy energy_from_intensity(double i, double r0, double beta_0) {
  return PulseEnergy{i * r0 * r0 / beta_0};
}

double transmit_pulse(double t, double p0, const SensorModel& sensor) {
  if (!(t >= 0.0 && t <= 2.0 * sensor.tau_h)) return 0.0;
  const double s = std::sin(kPi * t / (2.0 * sensor.tau_h));
  return p0 * s * s;
}

double crossover(double r, const SensorModel& sensor) {
  if (r <= sensor.r1) return 0.0;
  if (r >= sensor.r2) return 1.0;
  return (r - sensor.r1) / (sensor.r2 - sensor.r1);
}

double transmission(double r, double alpha) { return std::exp(-alpha * r); }

double clear_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                      const SensorModel& sensor) {
  if (!(r0 > sensor.r2)) {
    std::ostringstream msg;
    msg << "hard target at " << r0 << " m lies inside the crossover region (r2 = " << sensor.r2 << " m)";
    fail(ErrorKind::Domain, msg.str());
  }
  const double c_tau = SensorModel::c * sensor.tau_h;
  if (sensor.peak_correction) r += c_tau / 2.0;
  if (!(r >= r0 && r <= r0 + c_tau)) return 0.0;
  const double s = std::sin(kPi * (r - r0) / c_tau);
  return energy.ca_p0 * fog.beta_0 / (r0 * r0) * s * s;
}

double hard_fog_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                         const SensorModel& sensor) {
  return std::exp(-2.0 * fog.alpha * r0) * clear_response(r, r0, energy, fog, sensor);
}

double hard_peak_intensity(double i, double r0, double alpha) {
  if (r0 == 0.0) fail(ErrorKind::Domain, "hard_peak_intensity: zero range");
  return i * std::exp(-2.0 * alpha * r0);
}

double soft_integrand(double t, double r, const FogParams& fog, const SensorModel& sensor) {
  const double d = r - SensorModel::c * t / 2.0;
  if (d <= sensor.r1) return 0.0;
  const double s = std::sin(kPi * t / (2.0 * sensor.tau_h));
  return s * s * std::exp(-2.0 * fog.alpha * d) / (d * d) * crossover(d, sensor);
}

double soft_response_integral(double r, const FogParams& fog, const SensorModel& sensor,
                              std::uint32_t subintervals) {
  check_subintervals(subintervals);
  return integrate_window(r, 0.0, fog, sensor, subintervals);
}

double soft_response_integral(double r, const FogParams& fog, const SensorModel& sensor) {
  return soft_response_integral(r, fog, sensor, sensor.subintervals);
}

double soft_response_curve(double r, double r0, const FogParams& fog, const SensorModel& sensor) {
  check_subintervals(sensor.subintervals);
  // The fog volume ends at the hard target: only slant ranges <= r0 contribute.
  if (r - r0 >= SensorModel::c * sensor.tau_h) return 0.0;
  const double t_lo = std::max(0.0, 2.0 * (r - r0) / SensorModel::c);
  return integrate_window(r, t_lo, fog, sensor, sensor.subintervals);
}

double soft_fog_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                         const SensorModel& sensor) {
  if (sensor.peak_correction) r += sensor.half_pulse_range();
  return energy.ca_p0 * fog.beta * soft_response_curve(r, r0, fog, sensor);
}

}  // namespace fogsim
