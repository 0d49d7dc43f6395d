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

#ifndef CURVECLOUD_IO_HPP_
#define CURVECLOUD_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/feature_map.hpp"
#include "curvecloud/point_cloud.hpp"

// File formats. Binary formats are little-endian regardless of host; floats
// are IEEE-754 binary32 on disk and widened to double on load. Readers throw
// FormatError on truncated or inconsistent input.
namespace curvecloud::io {

// Scans. CSV has the header `x,y,z,t,beam`; binary is
// u32 N, u32 B, then N records of (f32 x, f32 y, f32 z, f64 t, u32 beam).
// For CSV input the beam count is the largest beam id present.
PointCloud read_scan_csv(std::istream& in);
void write_scan_csv(std::ostream& out, const PointCloud& pc);
PointCloud read_scan_binary(std::istream& in);
void write_scan_binary(std::ostream& out, const PointCloud& pc);

// Picks the format from the extension: `.csv` is text, anything else binary.
PointCloud read_scan(const std::filesystem::path& path);
void write_scan(const std::filesystem::path& path, const PointCloud& pc);

// u32 N, u32 M, N x 3 f32 positions, (M + 1) u32 offsets, M u32 beam ids.
CurveCloud read_curve_cloud(std::istream& in);
void write_curve_cloud(std::ostream& out, const CurveCloud& cc);
CurveCloud read_curve_cloud(const std::filesystem::path& path);
void write_curve_cloud(const std::filesystem::path& path, const CurveCloud& cc);

// u32 N, u32 D, N x D f32 row-major.
FeatureMap read_feature_map(std::istream& in);
void write_feature_map(std::ostream& out, const FeatureMap& f);

// CSV with header `index,label`, one row per point in index order.
std::vector<std::uint32_t> read_labels_csv(std::istream& in);
void write_labels_csv(std::ostream& out, std::span<const std::uint32_t> labels);
std::vector<std::uint32_t> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path,
                      std::span<const std::uint32_t> labels);

using Rgb = std::array<std::uint8_t, 3>;

// Fixed 16-entry palette; labels wrap around.
Rgb label_color(std::uint32_t label);

// ASCII PLY with x, y, z (float) and red, green, blue (uchar) per vertex.
void write_ply(std::ostream& out, std::span<const Vec3> points,
               std::span<const std::uint32_t> labels);
void write_ply(const std::filesystem::path& path, std::span<const Vec3> points,
               std::span<const std::uint32_t> labels);

std::vector<char> read_file(const std::filesystem::path& path);

}  // namespace curvecloud::io

#endif  // CURVECLOUD_IO_HPP_
