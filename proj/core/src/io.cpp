// Copyright 2026 The CurveCloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "curvecloud/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

namespace curvecloud::io {
namespace {

// --- little-endian primitives -------------------------------------------

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff),
                         static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  Reader(std::istream& in, const char* what) : in_(in), what_(what) {}

  std::uint32_t u32() {
    unsigned char b[4];
    read(b, 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  double f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError(std::string(what_) + ": trailing bytes after payload");
    }
  }

 private:
  void read(unsigned char* dst, std::size_t n) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw FormatError(std::string(what_) + ": unexpected end of data");
    }
  }

  std::istream& in_;
  const char* what_;
};

// --- text helpers ---------------------------------------------------------

void put_number(std::ostream& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  T value{};
  const auto r = std::from_chars(field.data(), field.data() + field.size(), value);
  if (r.ec != std::errc() || r.ptr != field.data() + field.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse '" +
                      std::string(field) + "'");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput(std::string(what) + " too large for the file format");
  }
  return static_cast<std::uint32_t>(n);
}

bool has_csv_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv";
}

void check_loaded_scan(const PointCloud& pc) {
  try {
    check_point_cloud(pc);
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("invalid scan: ") + e.what());
  }
}

}  // namespace

// --- scans ----------------------------------------------------------------

PointCloud read_scan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("scan CSV is empty");
  const auto header = split_fields(line);
  const std::vector<std::string_view> expected = {"x", "y", "z", "t", "beam"};
  if (header != expected) {
    throw FormatError("scan CSV header must be 'x,y,z,t,beam'");
  }
  PointCloud pc;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const Vec3 p{parse_field<double>(f[0], line_no),
                 parse_field<double>(f[1], line_no),
                 parse_field<double>(f[2], line_no)};
    const double t = parse_field<double>(f[3], line_no);
    const auto beam = parse_field<std::uint32_t>(f[4], line_no);
    pc.push_back(p, t, beam);
    pc.beam_count = std::max(pc.beam_count, beam);
  }
  check_loaded_scan(pc);
  return pc;
}

void write_scan_csv(std::ostream& out, const PointCloud& pc) {
  check_point_cloud(pc);
  out << "x,y,z,t,beam\n";
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Vec3& p = pc.positions[i];
    put_number(out, p.x);
    out << ',';
    put_number(out, p.y);
    out << ',';
    put_number(out, p.z);
    out << ',';
    put_number(out, pc.timestamps[i]);
    out << ',' << pc.beam_ids[i] << '\n';
  }
}

PointCloud read_scan_binary(std::istream& in) {
  Reader r(in, "scan");
  const std::uint32_t n = r.u32();
  PointCloud pc;
  pc.beam_count = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const double x = r.f32();
    const double y = r.f32();
    const double z = r.f32();
    const double t = r.f64();
    pc.push_back(Vec3{x, y, z}, t, r.u32());
  }
  r.expect_end();
  check_loaded_scan(pc);
  return pc;
}

void write_scan_binary(std::ostream& out, const PointCloud& pc) {
  check_point_cloud(pc);
  put_u32(out, checked_u32(pc.size(), "scan"));
  put_u32(out, pc.beam_count);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    put_f32(out, pc.positions[i].x);
    put_f32(out, pc.positions[i].y);
    put_f32(out, pc.positions[i].z);
    put_f64(out, pc.timestamps[i]);
    put_u32(out, pc.beam_ids[i]);
  }
}

PointCloud read_scan(const std::filesystem::path& path) {
  auto in = open_in(path);
  return has_csv_extension(path) ? read_scan_csv(in) : read_scan_binary(in);
}

void write_scan(const std::filesystem::path& path, const PointCloud& pc) {
  auto out = open_out(path);
  if (has_csv_extension(path)) {
    write_scan_csv(out, pc);
  } else {
    write_scan_binary(out, pc);
  }
  finish(out, path);
}

// --- curve clouds -----------------------------------------------------------

CurveCloud read_curve_cloud(std::istream& in) {
  Reader r(in, "curve cloud");
  const std::uint32_t n = r.u32();
  const std::uint32_t m = r.u32();
  CurveCloud cc;
  cc.positions.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double x = r.f32();
    const double y = r.f32();
    const double z = r.f32();
    cc.positions.push_back(Vec3{x, y, z});
  }
  cc.offsets.assign(static_cast<std::size_t>(m) + 1, 0);
  for (auto& o : cc.offsets) o = r.u32();
  cc.source_beam.assign(m, 0);
  for (auto& b : cc.source_beam) b = r.u32();
  r.expect_end();
  try {
    check_structure(cc);
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("invalid curve cloud: ") + e.what());
  }
  return cc;
}

void write_curve_cloud(std::ostream& out, const CurveCloud& cc) {
  check_structure(cc);
  put_u32(out, checked_u32(cc.num_points(), "curve cloud"));
  put_u32(out, checked_u32(cc.num_curves(), "curve cloud"));
  for (const Vec3& p : cc.positions) {
    put_f32(out, p.x);
    put_f32(out, p.y);
    put_f32(out, p.z);
  }
  for (Index o : cc.offsets) put_u32(out, o);
  for (std::uint32_t b : cc.source_beam) put_u32(out, b);
}

CurveCloud read_curve_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_curve_cloud(in);
}

void write_curve_cloud(const std::filesystem::path& path, const CurveCloud& cc) {
  auto out = open_out(path);
  write_curve_cloud(out, cc);
  finish(out, path);
}

// --- feature maps -----------------------------------------------------------

FeatureMap read_feature_map(std::istream& in) {
  Reader r(in, "feature map");
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  std::vector<double> values;
  values.reserve(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) values.push_back(r.f32());
  return FeatureMap(rows, cols, std::move(values));
}

void write_feature_map(std::ostream& out, const FeatureMap& f) {
  put_u32(out, checked_u32(f.rows(), "feature map"));
  put_u32(out, checked_u32(f.cols(), "feature map"));
  for (double v : f.values()) put_f32(out, v);
}

// --- labels -----------------------------------------------------------------

std::vector<std::uint32_t> read_labels_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "index,label") {
    throw FormatError("labels CSV header must be 'index,label'");
  }
  std::vector<std::uint32_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 2) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 2 fields");
    }
    if (parse_field<std::size_t>(f[0], line_no) != labels.size()) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": indices must be 0, 1, 2, ...");
    }
    labels.push_back(parse_field<std::uint32_t>(f[1], line_no));
  }
  return labels;
}

void write_labels_csv(std::ostream& out, std::span<const std::uint32_t> labels) {
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << labels[i] << '\n';
  }
}

std::vector<std::uint32_t> read_labels_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels_csv(in);
}

void write_labels_csv(const std::filesystem::path& path,
                      std::span<const std::uint32_t> labels) {
  auto out = open_out(path);
  write_labels_csv(out, labels);
  finish(out, path);
}

// --- PLY --------------------------------------------------------------------

Rgb label_color(std::uint32_t label) {
  static constexpr Rgb kPalette[16] = {
      {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
      {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
      {210, 245, 60},  {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
      {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {128, 128, 128},
  };
  return kPalette[label % 16];
}

void write_ply(std::ostream& out, std::span<const Vec3> points,
               std::span<const std::uint32_t> labels) {
  if (points.size() != labels.size()) {
    throw InvalidInput(std::to_string(labels.size()) + " labels for " +
                       std::to_string(points.size()) + " points");
  }
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\n"
         "end_header\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Rgb c = label_color(labels[i]);
    put_number(out, static_cast<float>(points[i].x));
    out << ' ';
    put_number(out, static_cast<float>(points[i].y));
    out << ' ';
    put_number(out, static_cast<float>(points[i].z));
    out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]) << '\n';
  }
}

void write_ply(const std::filesystem::path& path, std::span<const Vec3> points,
               std::span<const std::uint32_t> labels) {
  auto out = open_out(path);
  write_ply(out, points, labels);
  finish(out, path);
}

std::vector<char> read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

}  // namespace curvecloud::io
