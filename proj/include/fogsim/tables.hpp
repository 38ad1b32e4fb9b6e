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
#include <filesystem>
#include <optional>
#include <vector>

#include "fogsim/optics.hpp"

namespace fogsim {

/// Result of a soft-return maximum search over the range grid up to r0.
struct SoftMax {
  double value = 0.0;  // max of the soft integral, 0 if the grid is empty
  double range = 0.0;  // grid range attaining it (first occurrence), 0 if empty

  friend bool operator==(const SoftMax&, const SoftMax&) = default;
};

inline constexpr std::size_t kDefaultMaxTableEntries = 1'000'000;

/// Number of grid points k * step (k >= 1) not exceeding r.
std::size_t grid_points_up_to(double r, double step);

/// The soft-target integral tabulated on the range grid r_k = k * step.
///
/// Grid points queried for a hard target at R0 satisfy r_k <= R0, where the
/// fog-volume cutoff is inactive, so entries do not depend on R0. Max/argmax
/// queries read the prefix arrays.
class SoftResponseTable {
 public:
  static SoftResponseTable build(const FogParams& fog, const SensorModel& sensor,
                                 std::size_t max_entries = kDefaultMaxTableEntries);

  /// Prefix max/argmax over grid points <= r0.
  /// Throws Error(OutOfRange) unless 0 < r0 <= max_range.
  SoftMax query(double r0) const;

  double alpha() const { return alpha_; }
  double grid_step() const { return grid_step_; }
  double max_range() const { return max_range_; }
  std::uint64_t sensor_fingerprint() const { return fingerprint_; }
  std::size_t size() const { return values_.size(); }

  /// values()[k - 1] is the integral at r_k = k * grid_step.
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& prefix_max() const { return prefix_max_; }
  const std::vector<double>& prefix_argmax() const { return prefix_argmax_; }

  /// Little-endian binary cache: "FOGT", u32 version, f64 alpha, f64 step,
  /// u64 count, u64 sensor fingerprint, then count f64 values.
  void save(const std::filesystem::path& path) const;

  /// Returns nullopt if the file is missing, corrupt, or was built for a
  /// different alpha or sensor.
  static std::optional<SoftResponseTable> load(const std::filesystem::path& path,
                                               const FogParams& fog, const SensorModel& sensor);

  /// Loads from `cache_dir` when a matching file exists, otherwise builds and
  /// stores it there.
  static SoftResponseTable load_or_build(const std::filesystem::path& cache_dir,
                                         const FogParams& fog, const SensorModel& sensor);

  static std::filesystem::path cache_file_name(const FogParams& fog, const SensorModel& sensor);

  friend bool operator==(const SoftResponseTable&, const SoftResponseTable&) = default;

 private:
  SoftResponseTable(double alpha, const SensorModel& sensor, std::vector<double> values);
  void compute_prefix();

  double alpha_ = 0.0;
  double grid_step_ = 0.0;
  double max_range_ = 0.0;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> values_;
  std::vector<double> prefix_max_;
  std::vector<double> prefix_argmax_;
};

/// Direct per-point evaluation: integrates at every grid range up to r0 and
/// scans for the first maximum. Reference path for the table.
SoftMax soft_max_naive(double r0, const FogParams& fog, const SensorModel& sensor);

}  // namespace fogsim
