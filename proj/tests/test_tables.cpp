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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "doctest.h"
#include "fogsim/error.hpp"
#include "fogsim/tables.hpp"
#include "oracle.hpp"

using namespace fogsim;
namespace fs = std::filesystem;

namespace {

FogParams fog_with(double alpha) {
  FogParams f;
  f.alpha = alpha;
  f.beta = 0.046 * alpha / 3;
  return f;
}

fs::path scratch_dir(const char* name) {
  auto dir = fs::temp_directory_path() / ("fogsim_tables_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("grid point counting") {
  CHECK(grid_points_up_to(0.05, 0.1) == 0);
  CHECK(grid_points_up_to(0.1, 0.1) == 1);
  CHECK(grid_points_up_to(0.35, 0.1) == 3);
  CHECK(grid_points_up_to(200.0, 0.1) == 2000);
  for (double r : {0.3, 0.7, 1.9, 29.9, 30.0, 123.4}) {
    const auto k = grid_points_up_to(r, 0.1);
    CHECK(k * 0.1 <= r);
    CHECK((k + 1) * 0.1 > r);
  }
}

TEST_CASE("table build") {
  const SensorModel sensor;
  const auto table = SoftResponseTable::build(fog_with(0.06), sensor);
  REQUIRE(table.size() == 2000);
  CHECK(table.alpha() == 0.06);
  CHECK(table.grid_step() == 0.1);

  for (std::size_t k = 1; k <= table.size(); ++k)
    REQUIRE(table.values()[k - 1] == soft_response_integral(k * 0.1, fog_with(0.06), sensor));

  for (std::size_t k = 0; k < 9; ++k) CHECK(table.values()[k] == 0.0);
  CHECK(table.values()[9] > 0.0);

  double running = -1.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    CHECK(std::isfinite(table.values()[k]));
    CHECK(table.values()[k] >= 0.0);
    running = std::max(running, table.values()[k]);
    CHECK(table.prefix_max()[k] == running);
    if (k > 0) CHECK(table.prefix_max()[k] >= table.prefix_max()[k - 1]);
    CHECK(table.prefix_argmax()[k] <= (k + 1) * 0.1 + 1e-12);
  }

  CHECK(SoftResponseTable::build(fog_with(0.06), sensor) == table);

  SUBCASE("entry cap") {
    CHECK_THROWS_AS(SoftResponseTable::build(fog_with(0.06), sensor, 1000), Error);
  }
}

TEST_CASE("query edge cases") {
  const auto table = SoftResponseTable::build(fog_with(0.02), SensorModel{});
  CHECK(table.query(0.05) == SoftMax{});
  CHECK(table.query(0.5) == SoftMax{0.0, 0.1});
  CHECK_THROWS_AS(table.query(0.0), Error);
  CHECK_THROWS_AS(table.query(-3.0), Error);
  CHECK_THROWS_AS(table.query(200.5), Error);
  try {
    table.query(250.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
  CHECK_NOTHROW(table.query(200.0));
}

TEST_CASE("table queries equal the per-point loop exactly") {
  const SensorModel sensor;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> r0s(0.0, 200.0);
  for (double alpha : {0.005, 0.01, 0.02, 0.03, 0.06}) {
    const FogParams fog = fog_with(alpha);
    const auto table = SoftResponseTable::build(fog, sensor);
    for (int k = 0; k < 100; ++k) {
      const double r0 = 200.0 - r0s(rng);  // (0, 200]
      const SoftMax fast = table.query(r0);
      const SoftMax slow = soft_max_naive(r0, fog, sensor);
      REQUIRE(fast == slow);
      CHECK(fast.range <= r0);
    }
  }
}

TEST_CASE("prefix maximum is monotone in r0 and saturates") {
  const SensorModel sensor;
  for (double alpha : {0.02, 0.03, 0.06}) {
    const auto table = SoftResponseTable::build(fog_with(alpha), sensor);
    double prev = 0.0;
    for (double r0 = 0.1; r0 <= 200.0; r0 += 0.37) {
      const auto m = table.query(r0);
      CHECK(m.value >= prev);
      CHECK(m.range <= r0);
      prev = m.value;
    }
    // The soft integral peaks within a few meters and decays beyond; the
    // oracle confirms nothing in [150, 200] approaches the early maximum.
    const double early_peak = table.query(150.0).value;
    for (double r = 150.0; r <= 200.0; r += 5.0) CHECK(oracle::soft_integral(r, alpha) < 1e-3 * early_peak);
    CHECK(oracle::rel_diff(table.query(200.0).value, table.query(150.0).value) <= 1e-12);
    CHECK(table.query(200.0).range == table.query(150.0).range);
  }
}

TEST_CASE("binary table cache") {
  const SensorModel sensor;
  const FogParams fog = fog_with(0.03);
  const auto table = SoftResponseTable::build(fog, sensor);
  const auto dir = scratch_dir("cache");
  const auto path = dir / "t.bin";
  table.save(path);

  CHECK(fs::file_size(path) == 40 + 8 * table.size());
  {
    std::ifstream in(path, std::ios::binary);
    char head[40];
    in.read(head, 40);
    CHECK(std::memcmp(head, "FOGT", 4) == 0);
    std::uint32_t version;
    std::memcpy(&version, head + 4, 4);
    CHECK(version == 1);
    std::uint64_t count;
    std::memcpy(&count, head + 24, 8);
    CHECK(count == table.size());
  }

  const auto loaded = SoftResponseTable::load(path, fog, sensor);
  REQUIRE(loaded.has_value());
  CHECK(*loaded == table);

  CHECK_FALSE(SoftResponseTable::load(path, fog_with(0.06), sensor).has_value());
  SensorModel other = sensor;
  other.tau_h = 10e-9;
  CHECK_FALSE(SoftResponseTable::load(path, fog, other).has_value());
  CHECK_FALSE(SoftResponseTable::load(dir / "missing.bin", fog, sensor).has_value());

  SUBCASE("corruption falls back to a rebuild") {
    {
      std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
      f.seekp(1);
      f.put('X');
    }
    CHECK_FALSE(SoftResponseTable::load(path, fog, sensor).has_value());
    fs::resize_file(path, 100);
    CHECK_FALSE(SoftResponseTable::load(path, fog, sensor).has_value());
  }

  SUBCASE("load_or_build populates the cache") {
    const auto cache = dir / "auto";
    const auto first = SoftResponseTable::load_or_build(cache, fog, sensor);
    CHECK(fs::exists(cache / SoftResponseTable::cache_file_name(fog, sensor)));
    const auto second = SoftResponseTable::load_or_build(cache, fog, sensor);
    CHECK(first == second);
    CHECK(first == table);
  }
}
