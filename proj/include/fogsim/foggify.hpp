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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fogsim/optics.hpp"
#include "fogsim/point_cloud.hpp"
#include "fogsim/tables.hpp"

namespace fogsim {

enum class Provenance : std::uint8_t {
  HardKept = 0,
  SoftReplaced = 1,
};

struct PointResult {
  Point point;
  Provenance provenance = Provenance::HardKept;
  // Zero range, non-finite values, or beyond the table: passed through as is.
  bool degenerate = false;
};

struct IntensitySummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct FoggifyStats {
  std::size_t n_points = 0;
  std::size_t n_soft_replaced = 0;
  std::size_t n_skipped = 0;
  double fraction_replaced = 0.0;
  IntensitySummary intensity_before;
  IntensitySummary intensity_after;
  double rescale_factor = 1.0;
};

struct FoggifyOutcome {
  PointCloud cloud;
  std::vector<Provenance> provenance;
  FoggifyStats stats;
};

enum class SoftQuery {
  Table,  // prefix max/argmax lookup
  Naive,  // integrate the whole grid for every point
};

struct FoggifyOptions {
  std::uint64_t seed = 0;
  // Map the largest output intensity onto the cloud's intensity_scale.
  bool rescale = false;
  unsigned workers = 0;  // 0 = hardware concurrency
  SoftQuery query = SoftQuery::Table;
};

/// Range-noise factor 2^(2u - 1) in (1/2, 2) for a draw u in (0, 1).
double noise_factor(double draw);

/// Transforms one clear-weather point. `table` must have been built for
/// fog.alpha; throws Error(InvalidArgument) otherwise.
PointResult foggify_point(const Point& p, const FogParams& fog, const SensorModel& sensor,
                          const SoftResponseTable& table, double noise_draw);

/// Transforms a whole cloud. Point k draws its noise from (seed, k), so the
/// result does not depend on the worker count.
/// Throws Error(EmptyCloud) for an empty cloud.
FoggifyOutcome foggify_cloud(const PointCloud& cloud, const FogParams& fog, const SensorModel& sensor,
                             const SoftResponseTable& table, const FoggifyOptions& options);

/// Builds the table for fog.alpha first (ignored in naive mode).
FoggifyOutcome foggify_cloud(const PointCloud& cloud, const FogParams& fog, const SensorModel& sensor,
                             const FoggifyOptions& options);

/// Meteorological optical range for an attenuation coefficient: 3 / alpha,
/// infinite for clear air.
double alpha_to_mor(double alpha);
double mor_to_alpha(double mor);
/// Backscattering coefficient 0.046 / MOR.
double mor_to_beta(double mor);
double alpha_to_beta(double alpha);

/// Attenuation coefficients used for training-time augmentation.
inline constexpr double kDefaultAlphaSchedule[] = {0.0, 0.005, 0.01, 0.02, 0.03, 0.06};

/// schedule[floor(draw * size)]. Throws Error(EmptySchedule) or
/// Error(InvalidArgument) for draws outside [0, 1).
double sample_alpha(std::span<const double> schedule, double draw);

}  // namespace fogsim
