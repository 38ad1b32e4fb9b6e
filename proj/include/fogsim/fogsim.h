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

#ifndef FOGSIM_FOGSIM_H
#define FOGSIM_FOGSIM_H

/*
 * C interface of the fogsim shared library.
 *
 * Objects are opaque handles created by fogsim_*_create/read/build functions
 * and released with the matching *_free. Every fallible call returns a
 * fogsim_status; on failure fogsim_last_error() describes the problem for the
 * calling thread. Output parameters are untouched on failure.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FOGSIM_BUILDING_LIBRARY)
#    define FOGSIM_API __declspec(dllexport)
#  else
#    define FOGSIM_API __declspec(dllimport)
#  endif
#else
#  define FOGSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fogsim_status {
  FOGSIM_OK = 0,
  FOGSIM_ERR_INVALID_ARGUMENT = 1,
  FOGSIM_ERR_DOMAIN = 2,
  FOGSIM_ERR_OUT_OF_RANGE = 3,
  FOGSIM_ERR_IO = 4,
  FOGSIM_ERR_MALFORMED_FILE = 5,
  FOGSIM_ERR_EMPTY_CLOUD = 6,
  FOGSIM_ERR_EMPTY_SCHEDULE = 7,
  FOGSIM_ERR_INTERNAL = 99
} fogsim_status;

/* Sensor optics. Times in seconds, ranges in meters. */
typedef struct fogsim_sensor {
  double tau_h;
  double r1;
  double r2;
  double range_step;
  double max_range;
  int peak_correction;
  uint32_t subintervals; /* Simpson panels per smooth segment, even */
} fogsim_sensor;

/* Atmosphere. mor may be NaN when unset. */
typedef struct fogsim_fog {
  double alpha;
  double beta;
  double beta_0;
  double mor;
} fogsim_fog;

typedef enum fogsim_format_kind {
  FOGSIM_FORMAT_BIN = 0,
  FOGSIM_FORMAT_PLY = 1
} fogsim_format_kind;

typedef struct fogsim_format {
  fogsim_format_kind kind;
  double intensity_scale;
  uint32_t columns;
  int allow_nonfinite;
} fogsim_format;

typedef struct fogsim_foggify_options {
  uint64_t seed;
  int rescale;
  unsigned workers; /* 0 = hardware concurrency */
  int naive;        /* integrate per point instead of using the table */
} fogsim_foggify_options;

typedef struct fogsim_intensity_summary {
  double min;
  double max;
  double mean;
} fogsim_intensity_summary;

typedef struct fogsim_stats {
  uint64_t n_points;
  uint64_t n_soft_replaced;
  uint64_t n_skipped;
  double fraction_replaced;
  fogsim_intensity_summary intensity_before;
  fogsim_intensity_summary intensity_after;
  double rescale_factor;
} fogsim_stats;

typedef struct fogsim_table fogsim_table;
typedef struct fogsim_cloud fogsim_cloud;

FOGSIM_API const char* fogsim_version(void);
FOGSIM_API const char* fogsim_status_name(fogsim_status status);
FOGSIM_API const char* fogsim_last_error(void);

FOGSIM_API void fogsim_sensor_default(fogsim_sensor* sensor);
FOGSIM_API void fogsim_fog_default(fogsim_fog* fog);
FOGSIM_API void fogsim_format_default(fogsim_format* format);
FOGSIM_API void fogsim_foggify_options_default(fogsim_foggify_options* options);
FOGSIM_API fogsim_status fogsim_sensor_validate(const fogsim_sensor* sensor);
FOGSIM_API fogsim_status fogsim_fog_validate(const fogsim_fog* fog);

/* Optical model. */
FOGSIM_API double fogsim_speed_of_light(void);
FOGSIM_API double fogsim_transmit_pulse(double t, double p0, const fogsim_sensor* sensor);
FOGSIM_API double fogsim_crossover(double r, const fogsim_sensor* sensor);
FOGSIM_API double fogsim_transmission(double r, double alpha);
FOGSIM_API fogsim_status fogsim_clear_response(double r, double r0, double ca_p0, const fogsim_fog* fog,
                                               const fogsim_sensor* sensor, double* out);
FOGSIM_API fogsim_status fogsim_hard_peak_intensity(double i, double r0, double alpha, double* out);
FOGSIM_API fogsim_status fogsim_soft_response_integral(double r, const fogsim_fog* fog,
                                                       const fogsim_sensor* sensor, uint32_t subintervals,
                                                       double* out);
/* Hard and soft received-power terms at range r for a hard target at r0. */
FOGSIM_API fogsim_status fogsim_response_sample(double r, double r0, double ca_p0, const fogsim_fog* fog,
                                                const fogsim_sensor* sensor, double* p_hard, double* p_soft);

/* Parameter conversions and schedule sampling. */
FOGSIM_API double fogsim_alpha_to_mor(double alpha);
FOGSIM_API double fogsim_mor_to_alpha(double mor);
FOGSIM_API double fogsim_mor_to_beta(double mor);
FOGSIM_API double fogsim_alpha_to_beta(double alpha);
FOGSIM_API size_t fogsim_default_alpha_schedule(const double** schedule);
FOGSIM_API fogsim_status fogsim_sample_alpha(const double* schedule, size_t n, double draw, double* out);
/* Counter-based random streams. */
#define FOGSIM_STREAM_RANGE_NOISE 0u
#define FOGSIM_STREAM_ALPHA_SCHEDULE 1u
#define FOGSIM_STREAM_FILE_SEED 2u
FOGSIM_API uint64_t fogsim_random_bits(uint64_t seed, uint32_t stream, uint64_t counter);
/* Uniform draw in (0, 1). */
FOGSIM_API double fogsim_uniform_draw(uint64_t seed, uint32_t stream, uint64_t counter);

/* Soft-response tables. */
FOGSIM_API fogsim_status fogsim_table_build(const fogsim_fog* fog, const fogsim_sensor* sensor,
                                            fogsim_table** out);
/* cache_dir may be NULL or empty to disable caching. */
FOGSIM_API fogsim_status fogsim_table_load_or_build(const char* cache_dir, const fogsim_fog* fog,
                                                    const fogsim_sensor* sensor, fogsim_table** out);
FOGSIM_API fogsim_status fogsim_table_save(const fogsim_table* table, const char* path);
FOGSIM_API fogsim_status fogsim_table_query(const fogsim_table* table, double r0, double* i_tmp,
                                            double* r_tmp);
FOGSIM_API size_t fogsim_table_size(const fogsim_table* table);
FOGSIM_API double fogsim_table_alpha(const fogsim_table* table);
FOGSIM_API void fogsim_table_free(fogsim_table* table);

/* Point clouds. Points are exchanged as x, y, z, intensity quadruples. */
FOGSIM_API fogsim_status fogsim_cloud_create(const double* xyzi, size_t n, double intensity_scale,
                                             fogsim_cloud** out);
FOGSIM_API fogsim_status fogsim_cloud_read(const char* path, const fogsim_format* format, fogsim_cloud** out);
FOGSIM_API fogsim_status fogsim_cloud_write(const fogsim_cloud* cloud, const char* path,
                                            const fogsim_format* format);
FOGSIM_API size_t fogsim_cloud_size(const fogsim_cloud* cloud);
FOGSIM_API fogsim_status fogsim_cloud_copy_points(const fogsim_cloud* cloud, double* xyzi, size_t capacity);
FOGSIM_API void fogsim_cloud_free(fogsim_cloud* cloud);

/*
 * Fog simulation. table may be NULL (built on the fly). provenance, if not
 * NULL, receives one byte per point: 0 = hard return kept, 1 = replaced by
 * the fog return. stats may be NULL.
 */
FOGSIM_API fogsim_status fogsim_foggify(const fogsim_cloud* in, const fogsim_fog* fog, const fogsim_sensor* sensor,
                                        const fogsim_table* table, const fogsim_foggify_options* options,
                                        fogsim_cloud** out, uint8_t* provenance, fogsim_stats* stats);

/* Strongest-return points with a last-return point within tol meters. */
FOGSIM_API fogsim_status fogsim_intersect(const fogsim_cloud* strongest, const fogsim_cloud* last, double tol,
                                          unsigned workers, fogsim_cloud** out);

#ifdef __cplusplus
}
#endif

#endif /* FOGSIM_FOGSIM_H */
