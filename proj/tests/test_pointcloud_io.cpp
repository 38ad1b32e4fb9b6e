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

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <unistd.h>

#include "doctest.h"
#include "fogsim/error.hpp"
#include "fogsim/pointcloud_io.hpp"

using namespace fogsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fogsim_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string floats(std::initializer_list<float> values) {
  std::string out;
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  return out;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double spread = 80.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> pos(-spread, spread), inten(0.0f, 255.0f);
  PointCloud c;
  for (std::size_t k = 0; k < n; ++k) c.points.push_back({pos(rng), pos(rng), pos(rng), inten(rng)});
  return c;
}

std::vector<std::size_t> brute_force_matches(const PointCloud& s, const PointCloud& l, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (const auto& q : l.points) {
      const double dx = s.points[k].x - q.x, dy = s.points[k].y - q.y, dz = s.points[k].z - q.z;
      if (dx * dx + dy * dy + dz * dz <= tol * tol) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("BinXYZI record framing") {
  const auto empty = scratch("empty.bin");
  write_bytes(empty, "");
  CHECK(read_cloud(empty).empty());

  const auto two = scratch("two.bin");
  write_bytes(two, floats({1, 2, 3, 4, -5, 6.5f, 7, 200}));
  const auto c = read_cloud(two);
  REQUIRE(c.size() == 2);
  CHECK(c.points[1] == Point{-5, 6.5, 7, 200});
  CHECK(c.intensity_scale == 255.0);

  const auto partial = scratch("partial.bin");
  write_bytes(partial, floats({1, 2, 3, 4, 5, 6, 7, 8}) + "x");
  try {
    read_cloud(partial);
    FAIL("expected MalformedFile");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedFile);
  }

  try {
    read_cloud(scratch("does-not-exist.bin"));
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("extra columns and intensity scales") {
  const auto five = scratch("five.bin");
  write_bytes(five, floats({1, 2, 3, 0.5f, 9, 4, 5, 6, 1.0f, 9}));
  CloudFormat fmt;
  fmt.columns = 5;
  fmt.intensity_scale = 1.0;
  const auto c = read_cloud(five, fmt);
  REQUIRE(c.size() == 2);
  CHECK(c.points[0].intensity == 127.5);
  CHECK(c.points[1].intensity == 255.0);

  const auto back = scratch("back.bin");
  fmt.columns = 4;
  write_cloud(c, back, fmt);
  CHECK(read_bytes(back) == floats({1, 2, 3, 0.5f, 4, 5, 6, 1.0f}));

  fmt.columns = 3;
  CHECK_THROWS_AS(read_cloud(five, fmt), Error);
}

TEST_CASE("non-finite values") {
  const auto nan_file = scratch("nan.bin");
  write_bytes(nan_file, floats({1, std::numeric_limits<float>::quiet_NaN(), 3, 4}));
  CHECK_THROWS_AS(read_cloud(nan_file), Error);
  CloudFormat fmt;
  fmt.allow_nonfinite = true;
  const auto c = read_cloud(nan_file, fmt);
  REQUIRE(c.size() == 1);
  CHECK(std::isnan(c.points[0].y));
}

TEST_CASE("BinXYZI round trip is bit-exact") {
  const auto cloud = random_cloud(10000, 1);
  const auto path = scratch("rt.bin");
  write_cloud(cloud, path);
  CHECK(fs::file_size(path) == 16 * cloud.size());
  const auto bytes = read_bytes(path);
  const auto again = read_cloud(path);
  REQUIRE(again.size() == cloud.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) REQUIRE(again.points[k] == cloud.points[k]);
  write_cloud(again, path);
  CHECK(read_bytes(path) == bytes);

  write_cloud(PointCloud{}, path);
  CHECK(fs::file_size(path) == 0);

  CHECK_THROWS_AS(write_cloud(cloud, scratch("no/such/dir/x.bin")), Error);
}

TEST_CASE("PLY text round trip") {
  CloudFormat ply;
  ply.kind = CloudFormatKind::TextPly;
  const auto cloud = random_cloud(2000, 2);
  const auto path = scratch("rt.ply");
  write_cloud(cloud, path, ply);
  const auto again = read_cloud(path, ply);
  REQUIRE(again.size() == cloud.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    CHECK(std::abs(again.points[k].x - cloud.points[k].x) <= 1e-5);
    CHECK(std::abs(again.points[k].y - cloud.points[k].y) <= 1e-5);
    CHECK(std::abs(again.points[k].z - cloud.points[k].z) <= 1e-5);
    CHECK(std::abs(again.points[k].intensity - cloud.points[k].intensity) <= 1e-5);
  }
  const auto text = read_bytes(path);
  CHECK(text.rfind("ply\nformat ascii 1.0\n", 0) == 0);
  CHECK(text.find("property float intensity\nend_header\n") != std::string::npos);

  SUBCASE("foreign headers") {
    const auto other = scratch("other.ply");
    write_bytes(other,
                "ply\r\nformat ascii 1.0\r\ncomment hi\r\nelement vertex 2\r\nproperty float intensity\r\n"
                "property float z\r\nproperty float y\r\nproperty float x\r\nelement face 0\r\n"
                "property list uchar int vertex_indices\r\nend_header\r\n10 3 2 1\r\n+20 -3 -2.5e0 -1\r\n");
    const auto c = read_cloud(other, ply);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0] == Point{1, 2, 3, 10});
    CHECK(c.points[1] == Point{-1, -2.5, -3, 20});

    write_bytes(other, "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n");
    CHECK_THROWS_AS(read_cloud(other, ply), Error);
    write_bytes(other, "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                       "property float z\nend_header\n1 2 3\n4 5 6\n");
    CHECK_THROWS_AS(read_cloud(other, ply), Error);
    write_bytes(other, "not a ply\n");
    CHECK_THROWS_AS(read_cloud(other, ply), Error);
  }
}

TEST_CASE("strongest-last intersection") {
  SUBCASE("identical clouds at zero tolerance") {
    const auto c = random_cloud(500, 3);
    const auto out = intersect_returns(c, c, 0.0);
    REQUIRE(out.size() == c.size());
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(out.points[k] == c.points[k]);
  }

  SUBCASE("disjoint clouds") {
    auto a = random_cloud(300, 4, 10.0);
    auto b = random_cloud(300, 5, 10.0);
    for (auto& p : b.points) p.x += 100.0;
    CHECK(intersect_returns(a, b, 1e-3).empty());
  }

  SUBCASE("jittered duplicate") {
    PointCloud strongest, last;
    strongest.points = {{10, 20, 1, 50}, {-4, 8, 0.5, 70}};
    last.points = {{10 + 1e-4, 20, 1, 30}};
    const auto out = intersect_returns(strongest, last, 1e-3);
    REQUIRE(out.size() == 1);
    CHECK(out.points[0] == strongest.points[0]);
    CHECK(match_returns(strongest, last, 1e-3) == brute_force_matches(strongest, last, 1e-3));
  }

  SUBCASE("matches brute force, subset and idempotent on random fixtures") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> jitter(0.0, 5e-4);
    for (int trial = 0; trial < 5; ++trial) {
      auto strongest = random_cloud(800, 10 + trial, 5.0);
      PointCloud last;
      for (std::size_t k = 0; k < strongest.size(); k += 2) {
        auto p = strongest.points[k];
        p.x += jitter(rng);
        p.y += jitter(rng);
        last.points.push_back(p);
      }
      for (double tol : {0.0, 5e-4, 1e-3, 0.05}) {
        const auto idx = match_returns(strongest, last, tol, 3);
        CHECK(idx == brute_force_matches(strongest, last, tol));
        const auto once = intersect_returns(strongest, last, tol);
        const auto twice = intersect_returns(once, last, tol);
        REQUIRE(once.size() == twice.size());
        for (std::size_t k = 0; k < once.size(); ++k) CHECK(once.points[k] == twice.points[k]);
        for (std::size_t k = 0; k < idx.size(); ++k) CHECK(once.points[k] == strongest.points[idx[k]]);
      }
    }
  }

  CHECK_THROWS_AS(intersect_returns(PointCloud{}, PointCloud{}, -1.0), Error);
}
