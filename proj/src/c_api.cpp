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

#include "fogsim/fogsim.h"

#include <cmath>
#include <iterator>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "fogsim/error.hpp"
#include "fogsim/foggify.hpp"
#include "fogsim/optics.hpp"
#include "fogsim/pointcloud_io.hpp"
#include "fogsim/random.hpp"
#include "fogsim/tables.hpp"

struct fogsim_table {
  fogsim::SoftResponseTable table;
};

struct fogsim_cloud {
  fogsim::PointCloud cloud;
};

namespace {

thread_local std::string g_last_error;

fogsim_status to_status(fogsim::ErrorKind kind) {
  using fogsim::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return FOGSIM_ERR_INVALID_ARGUMENT;
    case ErrorKind::Domain: return FOGSIM_ERR_DOMAIN;
    case ErrorKind::OutOfRange: return FOGSIM_ERR_OUT_OF_RANGE;
    case ErrorKind::Io: return FOGSIM_ERR_IO;
    case ErrorKind::MalformedFile: return FOGSIM_ERR_MALFORMED_FILE;
    case ErrorKind::EmptyCloud: return FOGSIM_ERR_EMPTY_CLOUD;
    case ErrorKind::EmptySchedule: return FOGSIM_ERR_EMPTY_SCHEDULE;
  }
  return FOGSIM_ERR_INTERNAL;
}

template <typename Fn>
fogsim_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FOGSIM_OK;
  } catch (const fogsim::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return FOGSIM_ERR_INTERNAL;
}

void require(const void* p, const char* name) {
  if (p == nullptr) fogsim::fail(fogsim::ErrorKind::InvalidArgument, std::string(name) + " must not be NULL");
}

fogsim::SensorModel to_cpp(const fogsim_sensor& s) {
  fogsim::SensorModel m;
  m.tau_h = s.tau_h;
  m.r1 = s.r1;
  m.r2 = s.r2;
  m.range_step = s.range_step;
  m.max_range = s.max_range;
  m.peak_correction = s.peak_correction != 0;
  m.subintervals = s.subintervals;
  return m;
}

fogsim::FogParams to_cpp(const fogsim_fog& f) {
  fogsim::FogParams p;
  p.alpha = f.alpha;
  p.beta = f.beta;
  p.beta_0 = f.beta_0;
  if (!std::isnan(f.mor)) p.mor = f.mor;
  return p;
}

fogsim::CloudFormat to_cpp(const fogsim_format& f) {
  fogsim::CloudFormat c;
  switch (f.kind) {
    case FOGSIM_FORMAT_BIN: c.kind = fogsim::CloudFormatKind::BinXYZI; break;
    case FOGSIM_FORMAT_PLY: c.kind = fogsim::CloudFormatKind::TextPly; break;
    default: fogsim::fail(fogsim::ErrorKind::InvalidArgument, "unknown cloud format");
  }
  c.intensity_scale = f.intensity_scale;
  c.columns = f.columns;
  c.allow_nonfinite = f.allow_nonfinite != 0;
  return c;
}

fogsim_intensity_summary to_c(const fogsim::IntensitySummary& s) { return {s.min, s.max, s.mean}; }

}  // namespace

extern "C" {

const char* fogsim_version(void) { return "1.0.0"; }

const char* fogsim_status_name(fogsim_status status) {
  switch (status) {
    case FOGSIM_OK: return "ok";
    case FOGSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FOGSIM_ERR_DOMAIN: return "domain error";
    case FOGSIM_ERR_OUT_OF_RANGE: return "out of range";
    case FOGSIM_ERR_IO: return "i/o error";
    case FOGSIM_ERR_MALFORMED_FILE: return "malformed file";
    case FOGSIM_ERR_EMPTY_CLOUD: return "empty cloud";
    case FOGSIM_ERR_EMPTY_SCHEDULE: return "empty schedule";
    case FOGSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fogsim_last_error(void) { return g_last_error.c_str(); }

void fogsim_sensor_default(fogsim_sensor* sensor) {
  if (sensor == nullptr) return;
  const fogsim::SensorModel m;
  *sensor = {m.tau_h, m.r1, m.r2, m.range_step, m.max_range, m.peak_correction ? 1 : 0, m.subintervals};
}

void fogsim_fog_default(fogsim_fog* fog) {
  if (fog == nullptr) return;
  const fogsim::FogParams p;
  *fog = {p.alpha, p.beta, p.beta_0, std::numeric_limits<double>::quiet_NaN()};
}

void fogsim_format_default(fogsim_format* format) {
  if (format == nullptr) return;
  *format = {FOGSIM_FORMAT_BIN, fogsim::kCanonicalIntensityScale, 4, 0};
}

void fogsim_foggify_options_default(fogsim_foggify_options* options) {
  if (options == nullptr) return;
  *options = {0, 0, 0, 0};
}

fogsim_status fogsim_sensor_validate(const fogsim_sensor* sensor) {
  return guarded([&] {
    require(sensor, "sensor");
    to_cpp(*sensor).validate();
  });
}

fogsim_status fogsim_fog_validate(const fogsim_fog* fog) {
  return guarded([&] {
    require(fog, "fog");
    to_cpp(*fog).validate();
  });
}

double fogsim_speed_of_light(void) { return fogsim::kSpeedOfLight; }

double fogsim_transmit_pulse(double t, double p0, const fogsim_sensor* sensor) {
  return sensor ? fogsim::transmit_pulse(t, p0, to_cpp(*sensor)) : std::numeric_limits<double>::quiet_NaN();
}

double fogsim_crossover(double r, const fogsim_sensor* sensor) {
  return sensor ? fogsim::crossover(r, to_cpp(*sensor)) : std::numeric_limits<double>::quiet_NaN();
}

double fogsim_transmission(double r, double alpha) { return fogsim::transmission(r, alpha); }

fogsim_status fogsim_clear_response(double r, double r0, double ca_p0, const fogsim_fog* fog,
                                    const fogsim_sensor* sensor, double* out) {
  return guarded([&] {
    require(fog, "fog");
    require(sensor, "sensor");
    require(out, "out");
    *out = fogsim::clear_response(r, r0, {ca_p0}, to_cpp(*fog), to_cpp(*sensor));
  });
}

fogsim_status fogsim_hard_peak_intensity(double i, double r0, double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = fogsim::hard_peak_intensity(i, r0, alpha);
  });
}

fogsim_status fogsim_soft_response_integral(double r, const fogsim_fog* fog, const fogsim_sensor* sensor,
                                            uint32_t subintervals, double* out) {
  return guarded([&] {
    require(fog, "fog");
    require(sensor, "sensor");
    require(out, "out");
    *out = fogsim::soft_response_integral(r, to_cpp(*fog), to_cpp(*sensor), subintervals);
  });
}

fogsim_status fogsim_response_sample(double r, double r0, double ca_p0, const fogsim_fog* fog,
                                     const fogsim_sensor* sensor, double* p_hard, double* p_soft) {
  return guarded([&] {
    require(fog, "fog");
    require(sensor, "sensor");
    require(p_hard, "p_hard");
    require(p_soft, "p_soft");
    const auto f = to_cpp(*fog);
    const auto s = to_cpp(*sensor);
    const double hard = fogsim::hard_fog_response(r, r0, {ca_p0}, f, s);
    const double soft = fogsim::soft_fog_response(r, r0, {ca_p0}, f, s);
    *p_hard = hard;
    *p_soft = soft;
  });
}

double fogsim_alpha_to_mor(double alpha) { return fogsim::alpha_to_mor(alpha); }
double fogsim_mor_to_alpha(double mor) { return fogsim::mor_to_alpha(mor); }
double fogsim_mor_to_beta(double mor) { return fogsim::mor_to_beta(mor); }
double fogsim_alpha_to_beta(double alpha) { return fogsim::alpha_to_beta(alpha); }

size_t fogsim_default_alpha_schedule(const double** schedule) {
  if (schedule != nullptr) *schedule = fogsim::kDefaultAlphaSchedule;
  return std::size(fogsim::kDefaultAlphaSchedule);
}

fogsim_status fogsim_sample_alpha(const double* schedule, size_t n, double draw, double* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(schedule, "schedule");
    *out = fogsim::sample_alpha({schedule, n}, draw);
  });
}

uint64_t fogsim_random_bits(uint64_t seed, uint32_t stream, uint64_t counter) {
  return fogsim::random_bits(seed, static_cast<fogsim::Stream>(stream), counter);
}

double fogsim_uniform_draw(uint64_t seed, uint32_t stream, uint64_t counter) {
  return fogsim::uniform_open(seed, static_cast<fogsim::Stream>(stream), counter);
}

fogsim_status fogsim_table_build(const fogsim_fog* fog, const fogsim_sensor* sensor, fogsim_table** out) {
  return fogsim_table_load_or_build(nullptr, fog, sensor, out);
}

fogsim_status fogsim_table_load_or_build(const char* cache_dir, const fogsim_fog* fog, const fogsim_sensor* sensor,
                                         fogsim_table** out) {
  return guarded([&] {
    require(fog, "fog");
    require(sensor, "sensor");
    require(out, "out");
    const std::filesystem::path dir = cache_dir ? cache_dir : "";
    *out = new fogsim_table{fogsim::SoftResponseTable::load_or_build(dir, to_cpp(*fog), to_cpp(*sensor))};
  });
}

fogsim_status fogsim_table_save(const fogsim_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    table->table.save(path);
  });
}

fogsim_status fogsim_table_query(const fogsim_table* table, double r0, double* i_tmp, double* r_tmp) {
  return guarded([&] {
    require(table, "table");
    require(i_tmp, "i_tmp");
    require(r_tmp, "r_tmp");
    const auto m = table->table.query(r0);
    *i_tmp = m.value;
    *r_tmp = m.range;
  });
}

size_t fogsim_table_size(const fogsim_table* table) { return table ? table->table.size() : 0; }

double fogsim_table_alpha(const fogsim_table* table) {
  return table ? table->table.alpha() : std::numeric_limits<double>::quiet_NaN();
}

void fogsim_table_free(fogsim_table* table) { delete table; }

fogsim_status fogsim_cloud_create(const double* xyzi, size_t n, double intensity_scale, fogsim_cloud** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(xyzi, "xyzi");
    if (!(std::isfinite(intensity_scale) && intensity_scale > 0.0))
      fogsim::fail(fogsim::ErrorKind::InvalidArgument, "intensity scale must be finite and > 0");
    auto handle = std::make_unique<fogsim_cloud>();
    handle->cloud.intensity_scale = intensity_scale;
    handle->cloud.points.resize(n);
    for (size_t k = 0; k < n; ++k)
      handle->cloud.points[k] = {xyzi[4 * k], xyzi[4 * k + 1], xyzi[4 * k + 2], xyzi[4 * k + 3]};
    *out = handle.release();
  });
}

fogsim_status fogsim_cloud_read(const char* path, const fogsim_format* format, fogsim_cloud** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    fogsim_format f;
    fogsim_format_default(&f);
    *out = new fogsim_cloud{fogsim::read_cloud(path, to_cpp(format ? *format : f))};
  });
}

fogsim_status fogsim_cloud_write(const fogsim_cloud* cloud, const char* path, const fogsim_format* format) {
  return guarded([&] {
    require(cloud, "cloud");
    require(path, "path");
    fogsim_format f;
    fogsim_format_default(&f);
    fogsim::write_cloud(cloud->cloud, path, to_cpp(format ? *format : f));
  });
}

size_t fogsim_cloud_size(const fogsim_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

fogsim_status fogsim_cloud_copy_points(const fogsim_cloud* cloud, double* xyzi, size_t capacity) {
  return guarded([&] {
    require(cloud, "cloud");
    const auto& pts = cloud->cloud.points;
    if (capacity < pts.size())
      fogsim::fail(fogsim::ErrorKind::InvalidArgument, "output buffer smaller than the cloud");
    if (!pts.empty()) require(xyzi, "xyzi");
    for (size_t k = 0; k < pts.size(); ++k) {
      xyzi[4 * k] = pts[k].x;
      xyzi[4 * k + 1] = pts[k].y;
      xyzi[4 * k + 2] = pts[k].z;
      xyzi[4 * k + 3] = pts[k].intensity;
    }
  });
}

void fogsim_cloud_free(fogsim_cloud* cloud) { delete cloud; }

fogsim_status fogsim_foggify(const fogsim_cloud* in, const fogsim_fog* fog, const fogsim_sensor* sensor,
                             const fogsim_table* table, const fogsim_foggify_options* options, fogsim_cloud** out,
                             uint8_t* provenance, fogsim_stats* stats) {
  return guarded([&] {
    require(in, "in");
    require(fog, "fog");
    require(sensor, "sensor");
    require(out, "out");
    fogsim_foggify_options opts;
    fogsim_foggify_options_default(&opts);
    if (options) opts = *options;

    fogsim::FoggifyOptions o;
    o.seed = opts.seed;
    o.rescale = opts.rescale != 0;
    o.workers = opts.workers;
    o.query = opts.naive ? fogsim::SoftQuery::Naive : fogsim::SoftQuery::Table;

    const auto f = to_cpp(*fog);
    const auto s = to_cpp(*sensor);
    auto outcome = table ? fogsim::foggify_cloud(in->cloud, f, s, table->table, o)
                         : fogsim::foggify_cloud(in->cloud, f, s, o);

    if (provenance)
      for (size_t k = 0; k < outcome.provenance.size(); ++k)
        provenance[k] = static_cast<uint8_t>(outcome.provenance[k]);
    if (stats) {
      const auto& st = outcome.stats;
      *stats = {st.n_points, st.n_soft_replaced, st.n_skipped, st.fraction_replaced,
                to_c(st.intensity_before), to_c(st.intensity_after), st.rescale_factor};
    }
    *out = new fogsim_cloud{std::move(outcome.cloud)};
  });
}

fogsim_status fogsim_intersect(const fogsim_cloud* strongest, const fogsim_cloud* last, double tol, unsigned workers,
                               fogsim_cloud** out) {
  return guarded([&] {
    require(strongest, "strongest");
    require(last, "last");
    require(out, "out");
    *out = new fogsim_cloud{fogsim::intersect_returns(strongest->cloud, last->cloud, tol, workers)};
  });
}

}  // extern "C"
