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

#pragma once

// Optical channel model of a pulsed time-of-flight LiDAR: sin^2 transmit
// pulse, bistatic crossover, homogeneous-medium transmission, and the received
// power of a hard (solid) target and a soft (fog volume) target.
//
// Ranges are in meters, times in seconds, coefficients in 1/m.

#include <cstdint>
#include <numbers>
#include <optional>

namespace fogsim {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct SensorModel {
  double tau_h = 20e-9;      // half-power pulse width [s]
  double r1 = 0.9;           // crossover start [m]
  double r2 = 1.0;           // crossover end [m], must stay below 2 m
  double range_step = 0.1;   // evaluation grid spacing [m]
  double max_range = 200.0;  // table extent [m]
  bool peak_correction = false;
  // Simpson panels per smooth segment of the soft-target integrand.
  std::uint32_t subintervals = 160;

  static constexpr double c = kSpeedOfLight;

  /// Throws Error(InvalidArgument) when any invariant is violated.
  void validate() const;

  /// c * tau_h / 2, the offset between rising edge and pulse peak in range.
  double half_pulse_range() const { return c * tau_h / 2.0; }

  /// Stable hash of every field that influences the soft-response values.
  std::uint64_t fingerprint() const;
};

struct FogParams {
  double alpha = 0.0;                          // attenuation [1/m]
  double beta = 0.0;                           // backscattering [1/m]
  double beta_0 = 1e-6 / std::numbers::pi;     // hard-target reflectivity [1/sr]
  std::optional<double> mor;                   // meteorological optical range [m]

  void validate() const;
};

/// Product C_A * P_0 recovered from a clear-weather reading.
struct PulseEnergy {
  double ca_p0 = 0.0;
};

/// Clear-weather energy implied by intensity `i` of a point at `r0`.
PulseEnergy energy_from_intensity(double i, double r0, double beta_0);

double transmit_pulse(double t, double p0, const SensorModel& sensor);

double crossover(double r, const SensorModel& sensor);

double transmission(double r, double alpha);

/// Closed-form clear-weather received power of a hard target at r0.
/// Throws Error(Domain) if r0 <= sensor.r2.
double clear_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                      const SensorModel& sensor);

/// Hard-target term under fog: exp(-2 alpha r0) * clear_response.
double hard_fog_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                         const SensorModel& sensor);

/// Attenuated hard-target peak intensity. Throws Error(Domain) if r0 == 0.
double hard_peak_intensity(double i, double r0, double alpha);

/// Integrand of the soft-target term (without the C_A P_0 beta prefactor).
/// Exactly zero once the slant range r - ct/2 falls at or below r1.
double soft_integrand(double t, double r, const FogParams& fog, const SensorModel& sensor);

/// Composite Simpson approximation of the soft-target integral over the
/// pulse duration. Valid for grid ranges r <= R0, where the fog volume
/// ends behind the evaluated range.
///
/// The integrand has slope discontinuities where the slant range crosses r1
/// and r2, so the window is split there and each smooth segment gets
/// `subintervals` panels. Throws Error(InvalidArgument) for odd or < 2 counts.
double soft_response_integral(double r, const FogParams& fog, const SensorModel& sensor,
                              std::uint32_t subintervals);
double soft_response_integral(double r, const FogParams& fog, const SensorModel& sensor);

/// Soft-target integral including the fog-volume cutoff at the hard target
/// r0, valid for any r (used for full response curves beyond r0).
double soft_response_curve(double r, double r0, const FogParams& fog, const SensorModel& sensor);

/// Soft-target received power: ca_p0 * beta * soft_response_curve.
double soft_fog_response(double r, double r0, PulseEnergy energy, const FogParams& fog,
                         const SensorModel& sensor);

}  // namespace fogsim
