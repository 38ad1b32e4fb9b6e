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

#include "fogsim/pointcloud_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <unistd.h>

#include "fogsim/error.hpp"
#include "parallel.hpp"

namespace fogsim {

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "read error on " + path.string());
  return buf;
}

void write_atomically(const fs::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorKind::Io, "write error on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename into " + path.string());
  }
}

float load_f32(const unsigned char* p) {
  const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                             (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  return std::bit_cast<float>(bits);
}

void store_f32(std::string& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

void check_scale(double scale) {
  if (!(std::isfinite(scale) && scale > 0.0))
    fail(ErrorKind::InvalidArgument, "intensity scale must be finite and > 0");
}

double to_canonical(double i, double file_scale) {
  return file_scale == kCanonicalIntensityScale ? i : i * kCanonicalIntensityScale / file_scale;
}

double from_canonical(double i, double cloud_scale, double file_scale) {
  return cloud_scale == file_scale ? i : i * file_scale / cloud_scale;
}

Point make_point(float x, float y, float z, float i, const CloudFormat& format, std::size_t index,
                 const fs::path& path) {
  if (!format.allow_nonfinite &&
      !(std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(i))) {
    std::ostringstream msg;
    msg << path.string() << ": non-finite value in record " << index;
    fail(ErrorKind::MalformedFile, msg.str());
  }
  return {x, y, z, to_canonical(i, format.intensity_scale)};
}

PointCloud read_bin(const fs::path& path, const CloudFormat& format) {
  if (format.columns < 4) fail(ErrorKind::InvalidArgument, "BinXYZI needs at least 4 columns");
  const std::string buf = slurp(path);
  const std::size_t record = 4 * format.columns;
  if (buf.size() % record != 0) {
    std::ostringstream msg;
    msg << path.string() << ": size " << buf.size() << " is not a multiple of the " << record
        << "-byte record";
    fail(ErrorKind::MalformedFile, msg.str());
  }
  PointCloud cloud;
  const std::size_t n = buf.size() / record;
  cloud.points.reserve(n);
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  for (std::size_t k = 0; k < n; ++k, p += record)
    cloud.points.push_back(
        make_point(load_f32(p), load_f32(p + 4), load_f32(p + 8), load_f32(p + 12), format, k, path));
  return cloud;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

PointCloud read_ply(const fs::path& path, const CloudFormat& format) {
  const std::string buf = slurp(path);
  std::string_view rest(buf);
  auto next_line = [&rest]() -> std::optional<std::string_view> {
    if (rest.empty()) return std::nullopt;
    const auto nl = rest.find('\n');
    const auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    return line;
  };
  auto malformed = [&path](const std::string& why) { fail(ErrorKind::MalformedFile, path.string() + ": " + why); };

  if (auto first = next_line(); !first || trim(*first) != "ply") malformed("missing 'ply' magic");

  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool saw_format = false;
  std::vector<std::string> properties;
  for (;;) {
    const auto line = next_line();
    if (!line) malformed("header not terminated by end_header");
    const auto tokens = split_ws(*line);
    if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "end_header") break;
    if (tokens[0] == "format") {
      if (tokens.size() < 2 || tokens[1] != "ascii") malformed("only ascii PLY is supported");
      saw_format = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) malformed("bad element line");
      in_vertex = tokens[1] == "vertex";
      std::size_t count = 0;
      const auto res = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count);
      if (res.ec != std::errc{}) malformed("bad element count");
      if (in_vertex)
        vertex_count = count;
      else if (count != 0)
        malformed("unsupported element '" + std::string(tokens[1]) + "'");
    } else if (tokens[0] == "property") {
      if (!in_vertex) continue;
      if (tokens.size() != 3 || tokens[1] == "list") malformed("unsupported vertex property line");
      properties.emplace_back(tokens[2]);
    } else {
      malformed("unknown header keyword '" + std::string(tokens[0]) + "'");
    }
  }
  if (!saw_format) malformed("missing format line");

  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    const auto it = std::find(properties.begin(), properties.end(), name);
    return it == properties.end() ? -1 : it - properties.begin();
  };
  const std::array<std::ptrdiff_t, 4> cols = {column("x"), column("y"), column("z"), column("intensity")};
  if (cols[0] < 0 || cols[1] < 0 || cols[2] < 0) malformed("vertex needs x, y and z properties");

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  std::vector<float> values(properties.size());
  for (std::size_t k = 0; k < vertex_count; ++k) {
    std::optional<std::string_view> line;
    do {
      line = next_line();
      if (!line) malformed("fewer vertices than declared");
    } while (trim(*line).empty());
    const auto tokens = split_ws(*line);
    if (tokens.size() != properties.size()) malformed("vertex " + std::to_string(k) + " has wrong field count");
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      const auto res = std::from_chars(tokens[j].data(), tokens[j].data() + tokens[j].size(), values[j]);
      if (res.ec != std::errc{} || res.ptr != tokens[j].data() + tokens[j].size()) {
        // from_chars does not accept a leading '+'
        const std::string tok(tokens[j]);
        char* end = nullptr;
        values[j] = std::strtof(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) malformed("bad number '" + tok + "'");
      }
    }
    const float i = cols[3] >= 0 ? values[cols[3]] : 0.0f;
    cloud.points.push_back(make_point(values[cols[0]], values[cols[1]], values[cols[2]], i, format, k, path));
  }
  return cloud;
}

void append_number(std::string& out, float v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

using CellKey = std::array<std::int64_t, 3>;

CellKey cell_of(const Point& p, double cell) {
  return {static_cast<std::int64_t>(std::floor(p.x / cell)), static_cast<std::int64_t>(std::floor(p.y / cell)),
          static_cast<std::int64_t>(std::floor(p.z / cell))};
}

bool finite_position(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

}  // namespace

PointCloud read_cloud(const fs::path& path, const CloudFormat& format) {
  check_scale(format.intensity_scale);
  PointCloud cloud = format.kind == CloudFormatKind::BinXYZI ? read_bin(path, format) : read_ply(path, format);
  cloud.intensity_scale = kCanonicalIntensityScale;
  cloud.frame_id = path.filename().string();
  return cloud;
}

void write_cloud(const PointCloud& cloud, const fs::path& path, const CloudFormat& format) {
  check_scale(format.intensity_scale);
  check_scale(cloud.intensity_scale);
  std::string out;
  if (format.kind == CloudFormatKind::BinXYZI) {
    out.reserve(16 * cloud.size());
    for (const auto& p : cloud.points) {
      store_f32(out, static_cast<float>(p.x));
      store_f32(out, static_cast<float>(p.y));
      store_f32(out, static_cast<float>(p.z));
      store_f32(out, static_cast<float>(from_canonical(p.intensity, cloud.intensity_scale, format.intensity_scale)));
    }
  } else {
    out = "ply\nformat ascii 1.0\ncomment written by fogsim\nelement vertex " + std::to_string(cloud.size()) +
          "\nproperty float x\nproperty float y\nproperty float z\nproperty float intensity\nend_header\n";
    for (const auto& p : cloud.points) {
      append_number(out, static_cast<float>(p.x));
      out.push_back(' ');
      append_number(out, static_cast<float>(p.y));
      out.push_back(' ');
      append_number(out, static_cast<float>(p.z));
      out.push_back(' ');
      append_number(out, static_cast<float>(from_canonical(p.intensity, cloud.intensity_scale, format.intensity_scale)));
      out.push_back('\n');
    }
  }
  write_atomically(path, out);
}

std::vector<std::size_t> match_returns(const PointCloud& strongest, const PointCloud& last, double tol,
                                       unsigned workers) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) fail(ErrorKind::InvalidArgument, "tolerance must be finite and >= 0");
  const double cell = tol > 0.0 ? tol : 1.0;

  std::vector<std::pair<CellKey, std::size_t>> grid;
  grid.reserve(last.size());
  for (std::size_t j = 0; j < last.size(); ++j)
    if (finite_position(last.points[j])) grid.emplace_back(cell_of(last.points[j], cell), j);
  std::sort(grid.begin(), grid.end());

  const double tol2 = tol * tol;
  std::vector<std::uint8_t> keep(strongest.size(), 0);
  detail::parallel_for(strongest.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Point& p = strongest.points[k];
      if (!finite_position(p)) continue;
      const CellKey home = cell_of(p, cell);
      for (int dx = -1; dx <= 1 && !keep[k]; ++dx)
        for (int dy = -1; dy <= 1 && !keep[k]; ++dy)
          for (int dz = -1; dz <= 1 && !keep[k]; ++dz) {
            const CellKey key = {home[0] + dx, home[1] + dy, home[2] + dz};
            auto lo = std::lower_bound(grid.begin(), grid.end(), key,
                                       [](const auto& e, const CellKey& k) { return e.first < k; });
            for (; lo != grid.end() && lo->first == key; ++lo) {
              const Point& q = last.points[lo->second];
              const double ex = p.x - q.x, ey = p.y - q.y, ez = p.z - q.z;
              if (ex * ex + ey * ey + ez * ez <= tol2) {
                keep[k] = 1;
                break;
              }
            }
          }
    }
  });

  std::vector<std::size_t> indices;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep[k]) indices.push_back(k);
  return indices;
}

PointCloud intersect_returns(const PointCloud& strongest, const PointCloud& last, double tol, unsigned workers) {
  PointCloud out;
  out.intensity_scale = strongest.intensity_scale;
  out.frame_id = strongest.frame_id;
  for (std::size_t k : match_returns(strongest, last, tol, workers)) out.points.push_back(strongest.points[k]);
  return out;
}

}  // namespace fogsim
