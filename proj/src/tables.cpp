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

#include "fogsim/tables.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

constexpr char kMagic[4] = {'F', 'O', 'G', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 8 + 8 + 8;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::size_t entry_count(const SensorModel& sensor) {
  const double ratio = std::ceil(sensor.max_range / sensor.range_step);
  return std::max(static_cast<std::size_t>(ratio), grid_points_up_to(sensor.max_range, sensor.range_step));
}

}  // namespace

std::size_t grid_points_up_to(double r, double step) {
  if (!(r >= step)) return 0;
  auto k = static_cast<std::size_t>(std::floor(r / step));
  while (static_cast<double>(k + 1) * step <= r) ++k;
  while (k > 0 && static_cast<double>(k) * step > r) --k;
  return k;
}

SoftResponseTable::SoftResponseTable(double alpha, const SensorModel& sensor, std::vector<double> values)
    : alpha_(alpha),
      grid_step_(sensor.range_step),
      max_range_(sensor.max_range),
      fingerprint_(sensor.fingerprint()),
      values_(std::move(values)) {
  compute_prefix();
}

void SoftResponseTable::compute_prefix() {
  prefix_max_.resize(values_.size());
  prefix_argmax_.resize(values_.size());
  double best = -1.0;
  double best_range = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > best) {
      best = values_[i];
      best_range = static_cast<double>(i + 1) * grid_step_;
    }
    prefix_max_[i] = best;
    prefix_argmax_[i] = best_range;
  }
}

SoftResponseTable SoftResponseTable::build(const FogParams& fog, const SensorModel& sensor,
                                           std::size_t max_entries) {
  fog.validate();
  sensor.validate();
  const std::size_t n = entry_count(sensor);
  if (n > max_entries) {
    std::ostringstream msg;
    msg << "table would need " << n << " entries (cap " << max_entries << ")";
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  std::vector<double> values(n);
  for (std::size_t k = 1; k <= n; ++k)
    values[k - 1] = soft_response_integral(static_cast<double>(k) * sensor.range_step, fog, sensor);
  return SoftResponseTable(fog.alpha, sensor, std::move(values));
}

SoftMax SoftResponseTable::query(double r0) const {
  if (!(r0 > 0.0 && r0 <= max_range_)) {
    std::ostringstream msg;
    msg << "query range " << r0 << " m outside (0, " << max_range_ << "]";
    fail(ErrorKind::OutOfRange, msg.str());
  }
  const std::size_t k = grid_points_up_to(r0, grid_step_);
  if (k == 0) return {};
  assert(k <= values_.size());
  return {prefix_max_[k - 1], prefix_argmax_[k - 1]};
}

SoftMax soft_max_naive(double r0, const FogParams& fog, const SensorModel& sensor) {
  const std::size_t n = grid_points_up_to(r0, sensor.range_step);
  if (n == 0) return {};
  double best = -1.0;
  double best_range = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double r = static_cast<double>(k) * sensor.range_step;
    // Grid ranges never pass the hard target, so the fog cutoff is inactive.
    assert(r <= r0);
    const double v = soft_response_integral(r, fog, sensor);
    if (v > best) {
      best = v;
      best_range = r;
    }
  }
  return {best, best_range};
}

void SoftResponseTable::save(const std::filesystem::path& path) const {
  std::string buf;
  buf.reserve(kHeaderSize + 8 * values_.size());
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u64(buf, std::bit_cast<std::uint64_t>(alpha_));
  put_u64(buf, std::bit_cast<std::uint64_t>(grid_step_));
  put_u64(buf, values_.size());
  put_u64(buf, fingerprint_);
  for (double v : values_) put_u64(buf, std::bit_cast<std::uint64_t>(v));

  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) fail(ErrorKind::Io, "cannot write table cache " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move table cache into place at " + path.string());
  }
}

std::optional<SoftResponseTable> SoftResponseTable::load(const std::filesystem::path& path,
                                                         const FogParams& fog,
                                                         const SensorModel& sensor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderSize) return std::nullopt;

  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (std::memcmp(p, kMagic, 4) != 0 || get_u32(p + 4) != kVersion) return std::nullopt;
  const double alpha = std::bit_cast<double>(get_u64(p + 8));
  const double step = std::bit_cast<double>(get_u64(p + 16));
  const std::uint64_t count = get_u64(p + 24);
  const std::uint64_t fingerprint = get_u64(p + 32);

  if (std::bit_cast<std::uint64_t>(alpha) != std::bit_cast<std::uint64_t>(fog.alpha) ||
      std::bit_cast<std::uint64_t>(step) != std::bit_cast<std::uint64_t>(sensor.range_step) ||
      fingerprint != sensor.fingerprint() || count != entry_count(sensor) ||
      buf.size() != kHeaderSize + 8 * count)
    return std::nullopt;

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(get_u64(p + kHeaderSize + 8 * i));
    if (!std::isfinite(values[i]) || values[i] < 0.0) return std::nullopt;
  }
  return SoftResponseTable(alpha, sensor, std::move(values));
}

std::filesystem::path SoftResponseTable::cache_file_name(const FogParams& fog, const SensorModel& sensor) {
  std::ostringstream name;
  name << "fogt-" << std::hex << std::setfill('0') << std::setw(16) << sensor.fingerprint() << '-'
       << std::setw(16) << std::bit_cast<std::uint64_t>(fog.alpha) << ".bin";
  return name.str();
}

SoftResponseTable SoftResponseTable::load_or_build(const std::filesystem::path& cache_dir,
                                                   const FogParams& fog, const SensorModel& sensor) {
  if (cache_dir.empty()) return build(fog, sensor);
  const auto path = cache_dir / cache_file_name(fog, sensor);
  if (auto cached = load(path, fog, sensor)) return std::move(*cached);

  auto table = build(fog, sensor);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  try {
    table.save(path);
  } catch (const Error&) {
    // An unwritable cache only costs a rebuild next time.
  }
  return table;
}

}  // namespace fogsim
