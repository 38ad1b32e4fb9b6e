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

#include "fogsim/foggify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fogsim/error.hpp"
#include "fogsim/random.hpp"
#include "parallel.hpp"

namespace fogsim {

namespace {

bool is_degenerate(const Point& p, double r0, double max_range) {
  return !std::isfinite(r0) || r0 == 0.0 || r0 > max_range || !std::isfinite(p.intensity) ||
         p.intensity < 0.0;
}

template <typename Query>
PointResult transform_point(const Point& p, const FogParams& fog, double max_range, Query&& query,
                            double noise_draw) {
  const double r0 = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (is_degenerate(p, r0, max_range)) return {p, Provenance::HardKept, true};

  const double ca_p0 = energy_from_intensity(p.intensity, r0, fog.beta_0).ca_p0;
  const double i_hard = hard_peak_intensity(p.intensity, r0, fog.alpha);
  const SoftMax soft = query(r0);
  const double i_soft = ca_p0 * fog.beta * soft.value;

  PointResult out{p, Provenance::HardKept, false};
  if (i_soft > i_hard) {
    // Only the range changes; the direction from the sensor is kept.
    const double new_range = soft.range * noise_factor(noise_draw);
    out.point.x = p.x / r0 * new_range;
    out.point.y = p.y / r0 * new_range;
    out.point.z = p.z / r0 * new_range;
    out.point.intensity = i_soft;
    out.provenance = Provenance::SoftReplaced;
  } else {
    out.point.intensity = i_hard;
  }
  return out;
}

void check_table(const SoftResponseTable& table, const FogParams& fog) {
  if (table.alpha() != fog.alpha) {
    std::ostringstream msg;
    msg << "soft-response table built for alpha " << table.alpha() << ", fog has alpha " << fog.alpha;
    fail(ErrorKind::InvalidArgument, msg.str());
  }
}

struct Accumulator {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++n;
  }

  IntensitySummary summary() const {
    if (n == 0) return {};
    return {min, max, sum / static_cast<double>(n)};
  }
};

template <typename Query>
FoggifyOutcome run_cloud(const PointCloud& cloud, const FogParams& fog, const SensorModel& sensor,
                         Query&& query, const FoggifyOptions& options) {
  if (cloud.empty()) fail(ErrorKind::EmptyCloud, "cannot foggify an empty point cloud");

  const std::size_t n = cloud.size();
  FoggifyOutcome outcome;
  outcome.cloud.points.resize(n);
  outcome.cloud.intensity_scale = cloud.intensity_scale;
  outcome.cloud.frame_id = cloud.frame_id;
  outcome.provenance.resize(n);
  std::vector<std::uint8_t> degenerate(n);

  detail::parallel_for(n, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double draw = uniform_open(options.seed, Stream::RangeNoise, k);
      const auto r = transform_point(cloud.points[k], fog, sensor.max_range, query, draw);
      outcome.cloud.points[k] = r.point;
      outcome.provenance[k] = r.provenance;
      degenerate[k] = r.degenerate;
    }
  });

  // Sequential reductions keep the statistics independent of the worker count.
  FoggifyStats& stats = outcome.stats;
  stats.n_points = n;
  Accumulator before;
  Accumulator after;
  for (std::size_t k = 0; k < n; ++k) {
    if (degenerate[k]) {
      ++stats.n_skipped;
      continue;
    }
    before.add(cloud.points[k].intensity);
    after.add(outcome.cloud.points[k].intensity);
    if (outcome.provenance[k] == Provenance::SoftReplaced) ++stats.n_soft_replaced;
  }
  stats.fraction_replaced = static_cast<double>(stats.n_soft_replaced) / static_cast<double>(n);
  stats.intensity_before = before.summary();

  if (options.rescale && after.n > 0 && after.max > 0.0) {
    const double peak = after.max;
    const double target = cloud.intensity_scale;
    stats.rescale_factor = target / peak;
    Accumulator rescaled;
    for (std::size_t k = 0; k < n; ++k) {
      if (degenerate[k]) continue;
      double& i = outcome.cloud.points[k].intensity;
      i = (i == peak) ? target : i * stats.rescale_factor;
      rescaled.add(i);
    }
    after = rescaled;
  }
  stats.intensity_after = after.summary();
  return outcome;
}

}  // namespace

double noise_factor(double draw) { return std::exp2(2.0 * draw - 1.0); }

PointResult foggify_point(const Point& p, const FogParams& fog, const SensorModel& sensor,
                          const SoftResponseTable& table, double noise_draw) {
  check_table(table, fog);
  if (!(noise_draw >= 0.0 && noise_draw < 1.0))
    fail(ErrorKind::InvalidArgument, "noise draw must lie in [0, 1)");
  const auto query = [&](double r0) { return table.query(r0); };
  return transform_point(p, fog, std::min(sensor.max_range, table.max_range()), query, noise_draw);
}

FoggifyOutcome foggify_cloud(const PointCloud& cloud, const FogParams& fog, const SensorModel& sensor,
                             const SoftResponseTable& table, const FoggifyOptions& options) {
  fog.validate();
  sensor.validate();
  if (options.query == SoftQuery::Naive) {
    const auto query = [&](double r0) { return soft_max_naive(r0, fog, sensor); };
    return run_cloud(cloud, fog, sensor, query, options);
  }
  check_table(table, fog);
  if (table.sensor_fingerprint() != sensor.fingerprint() || table.max_range() != sensor.max_range)
    fail(ErrorKind::InvalidArgument, "soft-response table was built for a different sensor model");
  const auto query = [&](double r0) { return table.query(r0); };
  return run_cloud(cloud, fog, sensor, query, options);
}

FoggifyOutcome foggify_cloud(const PointCloud& cloud, const FogParams& fog, const SensorModel& sensor,
                             const FoggifyOptions& options) {
  fog.validate();
  sensor.validate();
  if (options.query == SoftQuery::Naive) {
    const auto query = [&](double r0) { return soft_max_naive(r0, fog, sensor); };
    return run_cloud(cloud, fog, sensor, query, options);
  }
  return foggify_cloud(cloud, fog, sensor, SoftResponseTable::build(fog, sensor), options);
}

double alpha_to_mor(double alpha) {
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  return 3.0 / alpha;
}

double mor_to_alpha(double mor) {
  if (std::isinf(mor)) return 0.0;
  return 3.0 / mor;
}

double mor_to_beta(double mor) {
  if (std::isinf(mor)) return 0.0;
  return 0.046 / mor;
}

double alpha_to_beta(double alpha) { return mor_to_beta(alpha_to_mor(alpha)); }

double sample_alpha(std::span<const double> schedule, double draw) {
  if (schedule.empty()) fail(ErrorKind::EmptySchedule, "alpha schedule is empty");
  if (!(draw >= 0.0 && draw < 1.0)) fail(ErrorKind::InvalidArgument, "schedule draw must lie in [0, 1)");
  const auto idx = std::min(static_cast<std::size_t>(draw * static_cast<double>(schedule.size())),
                            schedule.size() - 1);
  return schedule[idx];
}

}  // namespace fogsim
