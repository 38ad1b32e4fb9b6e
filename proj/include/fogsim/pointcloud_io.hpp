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
#include <filesystem>
#include <vector>

#include "fogsim/point_cloud.hpp"

namespace fogsim {

enum class CloudFormatKind {
  // Headerless little-endian float32 records (x, y, z, intensity[, extra...]).
  BinXYZI,
  // ASCII PLY with float x, y, z, intensity vertex properties.
  TextPly,
};

struct CloudFormat {
  CloudFormatKind kind = CloudFormatKind::BinXYZI;
  // Maximum intensity value used by the file; loaded clouds are rescaled to
  // the canonical [0, 255] range and written back in this range.
  double intensity_scale = kCanonicalIntensityScale;
  // float32 columns per BinXYZI record; the first four are x, y, z, intensity.
  std::size_t columns = 4;
  // Accept NaN/Inf values instead of rejecting the file.
  bool allow_nonfinite = false;
};

/// Throws Error(Io) or Error(MalformedFile).
PointCloud read_cloud(const std::filesystem::path& path, const CloudFormat& format = {});

/// Writes through a temporary file renamed into place. BinXYZI output always
/// has four columns. Throws Error(Io).
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, const CloudFormat& format = {});

/// Indices of `strongest` points with a `last` point within Euclidean distance
/// `tol`, in ascending order.
std::vector<std::size_t> match_returns(const PointCloud& strongest, const PointCloud& last, double tol,
                                       unsigned workers = 0);

/// Strongest-return points also present in the last-return cloud.
PointCloud intersect_returns(const PointCloud& strongest, const PointCloud& last, double tol,
                             unsigned workers = 0);

inline constexpr double kDefaultIntersectTolerance = 1e-3;

}  // namespace fogsim
