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


// fogsim command-line frontend.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fogsim/fogsim.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitParams = 2;
constexpr int kStatsSchemaVersion = 1;
constexpr int kManifestSchemaVersion = 1;
constexpr double kReferenceIntensity = 100.0;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(fogsim_status status) {
  switch (status) {
    case FOGSIM_OK: return kExitOk;
    case FOGSIM_ERR_INVALID_ARGUMENT:
    case FOGSIM_ERR_DOMAIN:
    case FOGSIM_ERR_OUT_OF_RANGE:
    case FOGSIM_ERR_EMPTY_SCHEDULE: return kExitParams;
    default: return kExitIo;
  }
}

void check(fogsim_status status, const std::string& what) {
  if (status == FOGSIM_OK) return;
  const std::string detail = fogsim_last_error();
  throw CliError(exit_code_for(status), what.empty() ? detail : what + ": " + detail);
}

[[noreturn]] void bad_params(const std::string& msg) { throw CliError(kExitParams, msg); }

struct TableDeleter {
  void operator()(fogsim_table* t) const { fogsim_table_free(t); }
};
struct CloudDeleter {
  void operator()(fogsim_cloud* c) const { fogsim_cloud_free(c); }
};
using TablePtr = std::unique_ptr<fogsim_table, TableDeleter>;
using CloudPtr = std::unique_ptr<fogsim_cloud, CloudDeleter>;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError(kExitIo, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CliError(kExitIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CliError(kExitIo, "cannot rename into " + path.string());
  }
}

// Fog parameters as given on the command line.
struct FogArgs {
  std::optional<double> alpha;
  std::optional<double> mor;
  std::optional<double> beta;
  std::optional<double> beta0;

  void add(CLI::App* app, bool with_alpha) {
    if (with_alpha) {
      app->add_option("--alpha", alpha, "Attenuation coefficient alpha in 1/m");
      app->add_option("--mor", mor, "Meteorological optical range in m; sets alpha = 3/MOR");
    }
    app->add_option("--beta", beta,
                    "Backscattering coefficient in 1/m. Precedence: --beta, then derived from --mor "
                    "(0.046/MOR), then derived from alpha (0.046*alpha/3)");
    app->add_option("--beta0", beta0, "Differential reflectivity of the hard target, default 1e-6/pi");
  }

  fogsim_fog resolve_single() const {
    if (alpha && mor) bad_params("--alpha and --mor are mutually exclusive");
    if (!alpha && !mor) bad_params("one of --alpha or --mor is required");
    if (mor) {
      if (!(*mor > 0.0)) bad_params("--mor must be positive");
      return resolve(fogsim_mor_to_alpha(*mor), *mor);
    }
    return resolve(*alpha, std::nullopt);
  }

  fogsim_fog resolve(double a, std::optional<double> m) const {
    fogsim_fog fog;
    fogsim_fog_default(&fog);
    fog.alpha = a;
    fog.mor = m ? *m : std::nan("");
    if (beta) {
      fog.beta = *beta;
    } else if (m) {
      fog.beta = fogsim_mor_to_beta(*m);
    } else {
      fog.beta = fogsim_alpha_to_beta(a);
    }
    if (beta0) fog.beta_0 = *beta0;
    check(fogsim_fog_validate(&fog), "");
    return fog;
  }
};

struct SensorArgs {
  fogsim_sensor sensor{};
  bool peak_correction = false;

  SensorArgs() { fogsim_sensor_default(&sensor); }

  void add(CLI::App* app) {
    app->add_option("--tau-h", sensor.tau_h, "Half-power pulse width in seconds")->capture_default_str();
    app->add_option("--r1", sensor.r1, "Crossover start range in m")->capture_default_str();
    app->add_option("--r2", sensor.r2, "Full-overlap range in m")->capture_default_str();
    app->add_option("--range-step", sensor.range_step, "Range grid step in m")->capture_default_str();
    app->add_option("--max-range", sensor.max_range, "Maximum sensor range in m")->capture_default_str();
    app->add_option("--subintervals", sensor.subintervals, "Simpson panels per smooth segment (even)")
        ->capture_default_str();
    app->add_flag("--peak-correction", peak_correction,
                  "Report response curves and R_tmp at the pulse peak instead of the rising edge");
  }

  fogsim_sensor resolve() {
    sensor.peak_correction = peak_correction ? 1 : 0;
    check(fogsim_sensor_validate(&sensor), "");
    return sensor;
  }
};

struct FormatArgs {
  std::string kind = "auto";
  double intensity_scale = 255.0;
  std::uint32_t columns = 4;
  bool allow_nonfinite = false;

  void add(CLI::App* app) {
    app->add_option("--format", kind, "Point cloud format; auto picks by file extension")
        ->check(CLI::IsMember({"auto", "bin", "ply"}))
        ->capture_default_str();
    app->add_option("--intensity-scale", intensity_scale, "Full-scale intensity value of the files")
        ->capture_default_str();
    app->add_option("--columns", columns, "Float32 values per record in .bin files (>= 4)")
        ->capture_default_str();
    app->add_flag("--allow-nonfinite", allow_nonfinite, "Accept NaN/Inf coordinates instead of failing");
  }

  fogsim_format for_path(const fs::path& path) const {
    fogsim_format f;
    fogsim_format_default(&f);
    std::string k = kind;
    if (k == "auto") k = path.extension() == ".ply" ? "ply" : "bin";
    f.kind = k == "ply" ? FOGSIM_FORMAT_PLY : FOGSIM_FORMAT_BIN;
    f.intensity_scale = intensity_scale;
    f.columns = columns;
    f.allow_nonfinite = allow_nonfinite ? 1 : 0;
    return f;
  }
};

CloudPtr read_cloud(const fs::path& path, const FormatArgs& fmt) {
  const fogsim_format f = fmt.for_path(path);
  fogsim_cloud* raw = nullptr;
  check(fogsim_cloud_read(path.string().c_str(), &f, &raw), "reading " + path.string());
  return CloudPtr(raw);
}

void write_cloud(const fogsim_cloud* cloud, const fs::path& path, const FormatArgs& fmt) {
  const fogsim_format f = fmt.for_path(path);
  check(fogsim_cloud_write(cloud, path.string().c_str(), &f), "writing " + path.string());
}

TablePtr make_table(const fogsim_fog& fog, const fogsim_sensor& sensor, const std::string& cache_dir) {
  fogsim_table* raw = nullptr;
  check(fogsim_table_load_or_build(cache_dir.empty() ? nullptr : cache_dir.c_str(), &fog, &sensor, &raw),
        "building soft-response table");
  return TablePtr(raw);
}

json summary_json(const fogsim_intensity_summary& s) {
  return {{"min", finite_or_null(s.min)}, {"max", finite_or_null(s.max)}, {"mean", finite_or_null(s.mean)}};
}

unsigned available_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// simulate

struct SimulateArgs {
  std::string input;
  std::string output;
  FogArgs fog;
  SensorArgs sensor;
  FormatArgs format;
  std::uint64_t seed = 0;
  bool no_rescale = false;
  bool naive = false;
  std::string stats;
  std::string provenance;
  unsigned workers = 0;
  std::string table_cache;
};

int run_simulate(SimulateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const fogsim_sensor sensor = a.sensor.resolve();
  const fogsim_fog fog = a.fog.resolve_single();

  CloudPtr in = read_cloud(a.input, a.format);
  TablePtr table;
  if (!a.naive) table = make_table(fog, sensor, a.table_cache);

  fogsim_foggify_options opts;
  fogsim_foggify_options_default(&opts);
  opts.seed = a.seed;
  opts.rescale = a.no_rescale ? 0 : 1;
  opts.workers = a.workers;
  opts.naive = a.naive ? 1 : 0;

  std::vector<std::uint8_t> provenance(fogsim_cloud_size(in.get()));
  fogsim_stats stats{};
  fogsim_cloud* raw = nullptr;
  check(fogsim_foggify(in.get(), &fog, &sensor, table.get(), &opts, &raw, provenance.data(), &stats),
        "fog simulation");
  CloudPtr out(raw);
  write_cloud(out.get(), a.output, a.format);

  if (!a.provenance.empty()) {
    write_atomic(a.provenance, std::string(provenance.begin(), provenance.end()));
  }
  const double runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!a.stats.empty()) {
    json j = {
        {"schema_version", kStatsSchemaVersion},
        {"input", a.input},
        {"output", a.output},
        {"alpha", fog.alpha},
        {"mor", finite_or_null(fogsim_alpha_to_mor(fog.alpha))},
        {"beta", fog.beta},
        {"beta_0", fog.beta_0},
        {"tau_h", sensor.tau_h},
        {"seed", a.seed},
        {"rescale", !a.no_rescale},
        {"n_points", stats.n_points},
        {"n_soft_replaced", stats.n_soft_replaced},
        {"n_skipped", stats.n_skipped},
        {"fraction_replaced", finite_or_null(stats.fraction_replaced)},
        {"rescale_factor", finite_or_null(stats.rescale_factor)},
        {"intensity_before", summary_json(stats.intensity_before)},
        {"intensity_after", summary_json(stats.intensity_after)},
        {"runtime_ms", runtime_ms},
    };
    write_atomic(a.stats, j.dump(2) + "\n");
  }
  std::cout << "wrote " << stats.n_points << " points to " << a.output << " (" << stats.n_soft_replaced
            << " replaced by fog returns, " << stats.n_skipped << " skipped)\n";
  return kExitOk;
}

// sweep

struct SweepArgs {
  std::string input_dir;
  std::string output_dir;
  std::vector<double> alphas;
  FogArgs fog;
  SensorArgs sensor;
  FormatArgs format;
  std::uint64_t seed = 0;
  bool no_rescale = false;
  unsigned workers = 0;
  std::string table_cache;
  std::string manifest;
};

bool is_cloud_file(const fs::path& p, const std::string& kind) {
  const auto ext = p.extension();
  if (kind == "bin") return ext == ".bin";
  if (kind == "ply") return ext == ".ply";
  return ext == ".bin" || ext == ".ply";
}

int run_sweep(SweepArgs& a) {
  const fogsim_sensor sensor = a.sensor.resolve();
  std::vector<double> schedule = a.alphas;
  if (schedule.empty()) {
    const double* def = nullptr;
    const std::size_t n = fogsim_default_alpha_schedule(&def);
    schedule.assign(def, def + n);
  }

  std::error_code ec;
  if (!fs::is_directory(a.input_dir, ec)) throw CliError(kExitIo, "not a directory: " + a.input_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.input_dir)) {
    if (entry.is_regular_file() && is_cloud_file(entry.path(), a.format.kind)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CliError(kExitIo, "no point cloud files in " + a.input_dir);
  fs::create_directories(a.output_dir, ec);
  if (ec) throw CliError(kExitIo, "cannot create " + a.output_dir + ": " + ec.message());

  std::map<double, fogsim_fog> fogs;
  std::map<double, TablePtr> tables;
  for (double alpha : schedule) {
    if (fogs.count(alpha) != 0) continue;
    fogs.emplace(alpha, a.fog.resolve(alpha, std::nullopt));
    tables.emplace(alpha, make_table(fogs.at(alpha), sensor, a.table_cache));
  }

  fogsim_foggify_options base;
  fogsim_foggify_options_default(&base);
  base.rescale = a.no_rescale ? 0 : 1;

  const unsigned total = a.workers == 0 ? available_workers() : a.workers;
  const unsigned file_workers = std::max(1u, std::min<unsigned>(total, static_cast<unsigned>(files.size())));
  base.workers = std::max(1u, total / file_workers);

  json entries = json::object();
  json failures = json::object();
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const std::string name = files[i].filename().string();
      try {
        const std::uint64_t key = fnv1a(name);
        const double draw = fogsim_uniform_draw(a.seed, FOGSIM_STREAM_ALPHA_SCHEDULE, key);
        double alpha = 0.0;
        check(fogsim_sample_alpha(schedule.data(), schedule.size(), draw, &alpha), "sampling alpha");
        fogsim_foggify_options opts = base;
        opts.seed = fogsim_random_bits(a.seed, FOGSIM_STREAM_FILE_SEED, key);

        CloudPtr in = read_cloud(files[i], a.format);
        const fogsim_fog& fog = fogs.at(alpha);
        fogsim_stats stats{};
        fogsim_cloud* raw = nullptr;
        check(fogsim_foggify(in.get(), &fog, &sensor, tables.at(alpha).get(), &opts, &raw, nullptr, &stats),
              "fog simulation of " + name);
        CloudPtr out(raw);
        write_cloud(out.get(), fs::path(a.output_dir) / name, a.format);

        json entry = {{"alpha", alpha},
                      {"mor", finite_or_null(fogsim_alpha_to_mor(alpha))},
                      {"beta", fog.beta},
                      {"seed", opts.seed},
                      {"n_points", stats.n_points},
                      {"n_soft_replaced", stats.n_soft_replaced}};
        std::lock_guard lock(mu);
        entries[name] = std::move(entry);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        std::cerr << "fogsim sweep: " << name << ": " << e.what() << "\n";
        failures[name] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < file_workers; ++w) pool.emplace_back(work);
    work();
  }

  json manifest = {{"schema_version", kManifestSchemaVersion},
                   {"seed", a.seed},
                   {"alpha_schedule", schedule},
                   {"rescale", !a.no_rescale},
                   {"files", entries},
                   {"failed", failures}};
  const fs::path manifest_path =
      a.manifest.empty() ? fs::path(a.output_dir) / "manifest.json" : fs::path(a.manifest);
  write_atomic(manifest_path, manifest.dump(2) + "\n");
  std::cout << "processed " << entries.size() << " of " << files.size() << " files; manifest "
            << manifest_path.string() << "\n";
  return failures.empty() ? kExitOk : kExitIo;
}

// response

struct ResponseArgs {
  double r0 = 30.0;
  FogArgs fog;
  std::vector<double> alphas;
  SensorArgs sensor;
  std::optional<double> ca_p0;
  std::string csv;
  std::string table_cache;
};

struct Verdict {
  double hard_peak;
  double soft_peak;
  double r_tmp;
  bool soft_wins() const { return soft_peak > hard_peak; }
};

Verdict compare(double r0, double ca_p0, const fogsim_fog& fog, const fogsim_sensor& sensor,
                const std::string& cache) {
  TablePtr table = make_table(fog, sensor, cache);
  double i_tmp = 0.0;
  double r_tmp = 0.0;
  check(fogsim_table_query(table.get(), r0, &i_tmp, &r_tmp), "querying soft maximum");
  const double reflected = ca_p0 * fog.beta_0 / (r0 * r0);
  double hard = 0.0;
  check(fogsim_hard_peak_intensity(reflected, r0, fog.alpha, &hard), "hard peak");
  if (sensor.peak_correction) r_tmp -= fogsim_speed_of_light() * sensor.tau_h / 2.0;
  return {hard, ca_p0 * fog.beta * i_tmp, r_tmp};
}

void write_response_csv(const std::string& path, double r0, double ca_p0, const fogsim_fog& fog,
                        const fogsim_sensor& sensor) {
  const double end = r0 + fogsim_speed_of_light() * sensor.tau_h;
  std::string csv = "range,p_hard,p_soft\n";
  auto append = [&csv](double v, char sep) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    csv.append(buf, res.ptr);
    csv.push_back(sep);
  };
  for (std::uint64_t k = 1;; ++k) {
    const double r = static_cast<double>(k) * sensor.range_step;
    if (r > end) break;
    double p_hard = 0.0;
    double p_soft = 0.0;
    check(fogsim_response_sample(r, r0, ca_p0, &fog, &sensor, &p_hard, &p_soft), "response sample");
    append(r, ',');
    append(p_hard, ',');
    append(p_soft, '\n');
  }
  write_atomic(path, csv);
}

int run_response(ResponseArgs& a) {
  const fogsim_sensor sensor = a.sensor.resolve();
  if (!(a.r0 > sensor.r2)) bad_params("--r0 must exceed the full-overlap range r2");
  if (a.r0 > sensor.max_range) bad_params("--r0 exceeds --max-range");

  fogsim_fog probe;
  fogsim_fog_default(&probe);
  const double beta_0 = a.fog.beta0.value_or(probe.beta_0);
  const double ca_p0 = a.ca_p0.value_or(kReferenceIntensity * a.r0 * a.r0 / beta_0);
  if (!(ca_p0 >= 0.0) || !std::isfinite(ca_p0)) bad_params("--ca-p0 must be finite and non-negative");

  if (!a.alphas.empty()) {
    if (a.fog.alpha || a.fog.mor) bad_params("--alphas cannot be combined with --alpha or --mor");
    if (!a.csv.empty()) bad_params("--csv needs a single --alpha or --mor");
    std::optional<double> smallest;
    std::cout << "r0 = " << a.r0 << " m, ca_p0 = " << ca_p0 << "\n";
    for (double alpha : a.alphas) {
      const fogsim_fog fog = a.fog.resolve(alpha, std::nullopt);
      const Verdict v = compare(a.r0, ca_p0, fog, sensor, a.table_cache);
      std::cout << "alpha " << alpha << ": hard " << v.hard_peak << ", soft " << v.soft_peak << " at R_tmp "
                << v.r_tmp << " m: " << (v.soft_wins() ? "soft wins" : "hard wins") << "\n";
      if (v.soft_wins() && (!smallest || alpha < *smallest)) smallest = alpha;
    }
    if (smallest) {
      std::cout << "smallest overshadowing alpha: " << *smallest << "\n";
    } else {
      std::cout << "smallest overshadowing alpha: none\n";
    }
    return kExitOk;
  }

  const fogsim_fog fog = a.fog.resolve_single();
  const Verdict v = compare(a.r0, ca_p0, fog, sensor, a.table_cache);
  if (!a.csv.empty()) write_response_csv(a.csv, a.r0, ca_p0, fog, sensor);
  std::cout << "alpha " << fog.alpha << ", beta " << fog.beta << ", r0 " << a.r0 << " m\n"
            << "hard peak " << v.hard_peak << "\n"
            << "soft peak " << v.soft_peak << " at R_tmp " << v.r_tmp << " m\n"
            << "verdict: " << (v.soft_wins() ? "soft wins" : "hard wins") << "\n";
  return kExitOk;
}

// intersect

struct IntersectArgs {
  std::string strongest;
  std::string last;
  std::string output;
  double tolerance = 1e-3;
  FormatArgs format;
  unsigned workers = 0;
};

int run_intersect(IntersectArgs& a) {
  if (!(a.tolerance >= 0.0) || !std::isfinite(a.tolerance)) bad_params("--tolerance must be finite and >= 0");
  CloudPtr strongest = read_cloud(a.strongest, a.format);
  CloudPtr last = read_cloud(a.last, a.format);
  fogsim_cloud* raw = nullptr;
  check(fogsim_intersect(strongest.get(), last.get(), a.tolerance, a.workers, &raw), "intersecting returns");
  CloudPtr out(raw);
  write_cloud(out.get(), a.output, a.format);
  const std::size_t n = fogsim_cloud_size(strongest.get());
  const std::size_t kept = fogsim_cloud_size(out.get());
  const double fraction = n == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(n);
  std::cout << "retained " << kept << " of " << n << " points, fraction " << fraction << "\n";
  return kExitOk;
}

// Config files: key=value lines, '#' comments. Keys name long flags without
// the leading dashes. Values are appended as arguments unless the flag is
// already on the command line.

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& s) { return s == flag || s.rfind(flag + "=", 0) == 0; });
}

std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && sub == nullptr; ++i) {
    sub = app.get_subcommand_no_throw(args[i]);
  }
  if (sub == nullptr) bad_params("--config needs a subcommand");

  std::ifstream in(config_path);
  if (!in) throw CliError(kExitIo, "cannot read config file " + config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad_params(config_path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || key == "config") {
      bad_params(config_path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (flag_present(args, flag)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "yes" || value.empty()) {
        args.push_back(flag);
      } else if (value != "false" && value != "0" && value != "no") {
        bad_params(config_path + ":" + std::to_string(lineno) + ": flag '" + key + "' expects true or false");
      }
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fogsim: physically based fog simulation for LiDAR point clouds"};
  app.set_version_flag("--version", fogsim_version());
  app.require_subcommand(1);

  std::string config_unused;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_unused, "key=value file mirroring these flags; flags win");
  };

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Apply fog to one point cloud file");
  simulate->add_option("--input", sim.input, "Input point cloud")->required();
  simulate->add_option("--output", sim.output, "Output point cloud")->required();
  sim.fog.add(simulate, true);
  sim.sensor.add(simulate);
  sim.format.add(simulate);
  simulate->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
  simulate->add_flag("--no-rescale", sim.no_rescale, "Keep raw simulated intensities");
  simulate->add_flag("--naive", sim.naive, "Integrate per point instead of using the lookup table");
  simulate->add_option("--stats", sim.stats, "Write run statistics as JSON");
  simulate->add_option("--provenance", sim.provenance,
                       "Write one byte per point: 0 = hard return kept, 1 = fog return");
  simulate->add_option("--workers", sim.workers, "Worker threads, 0 = all cores")->capture_default_str();
  simulate->add_option("--table-cache", sim.table_cache, "Directory for cached soft-response tables");
  add_config(simulate);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Apply fog to every file of a directory with sampled alpha");
  sweep->add_option("--input-dir", sw.input_dir, "Directory of input clouds")->required();
  sweep->add_option("--output-dir", sw.output_dir, "Directory for output clouds")->required();
  sweep->add_option("--alphas", sw.alphas, "Comma separated alpha schedule (default 0,0.005,0.01,0.02,0.03,0.06)")
      ->delimiter(',');
  sw.fog.add(sweep, false);
  sw.sensor.add(sweep);
  sw.format.add(sweep);
  sweep->add_option("--seed", sw.seed, "Base seed")->capture_default_str();
  sweep->add_flag("--no-rescale", sw.no_rescale, "Keep raw simulated intensities");
  sweep->add_option("--workers", sw.workers, "Worker threads, 0 = all cores")->capture_default_str();
  sweep->add_option("--table-cache", sw.table_cache, "Directory for cached soft-response tables");
  sweep->add_option("--manifest", sw.manifest, "Manifest path (default <output-dir>/manifest.json)");
  add_config(sweep);

  ResponseArgs rs;
  auto* response = app.add_subcommand("response", "Compare hard and soft received power for a target at r0");
  response->add_option("--r0", rs.r0, "Hard target range in m")->capture_default_str();
  rs.fog.add(response, true);
  response->add_option("--alphas", rs.alphas, "Comma separated alphas; prints one verdict per alpha")
      ->delimiter(',');
  rs.sensor.add(response);
  response->add_option("--ca-p0", rs.ca_p0, "Pulse energy constant, default 100*r0^2/beta0");
  response->add_option("--csv", rs.csv, "Write range,p_hard,p_soft on the range grid");
  response->add_option("--table-cache", rs.table_cache, "Directory for cached soft-response tables");
  add_config(response);

  IntersectArgs is;
  auto* intersect = app.add_subcommand("intersect", "Keep strongest returns confirmed by a last return");
  intersect->add_option("--strongest", is.strongest, "Strongest-return cloud")->required();
  intersect->add_option("--last", is.last, "Last-return cloud")->required();
  intersect->add_option("--output", is.output, "Output cloud")->required();
  intersect->add_option("--tolerance", is.tolerance, "Match distance in m")->capture_default_str();
  is.format.add(intersect);
  intersect->add_option("--workers", is.workers, "Worker threads, 0 = all cores")->capture_default_str();
  add_config(intersect);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = apply_config(app, std::move(args));
    std::vector<char*> cargs;
    for (auto& s : args) cargs.push_back(s.data());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? kExitOk : kExitParams;
    }
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep->parsed()) return run_sweep(sw);
    if (response->parsed()) return run_response(rs);
    if (intersect->parsed()) return run_intersect(is);
  } catch (const CliError& e) {
    std::cerr << "fogsim: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "fogsim: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitParams;
}
