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

#include "curvecloud/curve_cloud.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "curvecloud/instrumentation.hpp"
#include "parallel.hpp"

namespace curvecloud {

void check_point_cloud(const PointCloud& pc) {
  const std::size_t n = pc.positions.size();
  if (pc.timestamps.size() != n || pc.beam_ids.size() != n) {
    throw InvalidInput("point cloud arrays differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_finite(pc.positions[i])) {
      throw InvalidInput("non-finite coordinate at point " + std::to_string(i));
    }
    if (!std::isfinite(pc.timestamps[i])) {
      throw InvalidInput("non-finite timestamp at point " + std::to_string(i));
    }
    const std::uint32_t b = pc.beam_ids[i];
    if (b < 1 || b > pc.beam_count) {
      throw InvalidInput("beam id " + std::to_string(b) + " of point " +
                         std::to_string(i) + " outside [1, " +
                         std::to_string(pc.beam_count) + "]");
    }
  }
}

void check_structure(const CurveCloud& cc) {
  if (cc.offsets.empty() || cc.offsets.front() != 0 ||
      cc.offsets.back() != cc.positions.size()) {
    throw InvalidInput("curve offset table must run from 0 to N");
  }
  for (std::size_t j = 1; j < cc.offsets.size(); ++j) {
    if (cc.offsets[j] <= cc.offsets[j - 1]) {
      throw InvalidInput("curve offsets not strictly increasing at " +
                         std::to_string(j));
    }
  }
  if (cc.source_beam.size() != cc.num_curves()) {
    throw InvalidInput("source_beam length differs from curve count");
  }
}

std::vector<Index> curve_ids(const CurveCloud& cc) {
  std::vector<Index> ids(cc.num_points());
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    std::fill(ids.begin() + cc.curve_begin(j), ids.begin() + cc.curve_end(j),
              static_cast<Index>(j));
  }
  return ids;
}

CurveCloud restrict_to(const CurveCloud& cc, std::span<const Index> indices) {
  check_structure(cc);
  CurveCloud out;
  out.positions.reserve(indices.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    const Index end = cc.curve_end(j);
    const std::size_t before = out.positions.size();
    while (k < indices.size() && indices[k] < end) {
      if (indices[k] < cc.curve_begin(j) ||
          (k > 0 && indices[k] <= indices[k - 1])) {
        throw InvalidInput("restrict_to indices must be ascending and unique");
      }
      out.positions.push_back(cc.positions[indices[k]]);
      ++k;
    }
    if (out.positions.size() > before) {
      out.offsets.push_back(static_cast<Index>(out.positions.size()));
      out.source_beam.push_back(cc.source_beam[j]);
    }
  }
  if (k != indices.size()) {
    throw InvalidInput("restrict_to index out of range");
  }
  return out;
}

double ConversionConfig::base_delta(std::uint32_t beam) const {
  return delta.size() == 1 ? delta.front() : delta.at(beam - 1);
}

double ConversionConfig::effective_delta(std::uint32_t beam,
                                         const Vec3& earlier) const {
  const double d = base_delta(beam);
  if (!range_scaling) return d;
  return d * std::sqrt(distance(earlier, sensor_origin) / reference_range);
}

void check_conversion_config(const ConversionConfig& cfg,
                             std::uint32_t beam_count) {
  if (cfg.delta.empty()) throw InvalidInput("delta must not be empty");
  for (double d : cfg.delta) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw InvalidInput("delta must be positive and finite");
    }
  }
  if (cfg.delta.size() > 1 && cfg.delta.size() < beam_count) {
    throw InvalidInput("per-beam delta list has " +
                       std::to_string(cfg.delta.size()) + " entries for " +
                       std::to_string(beam_count) + " beams");
  }
  if (!(cfg.reference_range > 0.0)) {
    throw InvalidInput("reference_range must be positive");
  }
  if (!is_finite(cfg.sensor_origin)) {
    throw InvalidInput("sensor origin must be finite");
  }
}

namespace presets {

ConversionConfig driving() {
  ConversionConfig cfg;
  cfg.delta = {0.08};
  cfg.range_scaling = true;
  return cfg;
}

ConversionConfig object() {
  ConversionConfig cfg;
  cfg.delta = {0.01};
  return cfg;
}

ConversionConfig multi_sensor_rig() {
  ConversionConfig cfg;
  cfg.delta = {0.1, 0.17, 0.1, 0.12, 0.1};
  cfg.range_scaling = true;
  return cfg;
}

}  // namespace presets

CurveCloud build_curve_cloud(const PointCloud& pc,
                             const ConversionConfig& cfg) {
  check_point_cloud(pc);
  check_conversion_config(cfg, pc.beam_count);

  const std::size_t n = pc.size();
  const std::size_t beams = pc.beam_count;
  CurveCloud out;
  if (n == 0) return out;

  // Counting sort by beam keeps input order inside each bucket.
  std::vector<Index> beam_start(beams + 1, 0);
  for (std::uint32_t b : pc.beam_ids) ++beam_start[b];
  std::partial_sum(beam_start.begin(), beam_start.end(), beam_start.begin());
  std::vector<Index> order(n);
  {
    std::vector<Index> cursor(beam_start.begin(), beam_start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      order[cursor[pc.beam_ids[i] - 1]++] = static_cast<Index>(i);
    }
  }

  std::vector<Index> curves_per_beam(beams, 0);
  internal::parallel_for(
      beams,
      [&](std::size_t b) {
        const auto first = order.begin() + beam_start[b];
        const auto last = order.begin() + beam_start[b + 1];
        if (first == last) return;
        std::stable_sort(first, last, [&](Index a, Index c) {
          return pc.timestamps[a] < pc.timestamps[c];
        });
        const auto beam = static_cast<std::uint32_t>(b + 1);
        Index curves = 1;
        for (auto it = first + 1; it != last; ++it) {
          const Vec3& prev = pc.positions[*(it - 1)];
          if (distance(prev, pc.positions[*it]) >
              cfg.effective_delta(beam, prev)) {
            ++curves;
          }
        }
        curves_per_beam[b] = curves;
      },
      2);

  std::vector<Index> curve_start(beams + 1, 0);
  std::partial_sum(curves_per_beam.begin(), curves_per_beam.end(),
                   curve_start.begin() + 1);
  const std::size_t m = curve_start.back();

  out.positions.resize(n);
  out.offsets.assign(m + 1, 0);
  out.source_beam.resize(m);
  out.offsets[m] = static_cast<Index>(n);

  internal::parallel_for(
      beams,
      [&](std::size_t b) {
        const Index lo = beam_start[b];
        const Index hi = beam_start[b + 1];
        if (lo == hi) return;
        const auto beam = static_cast<std::uint32_t>(b + 1);
        Index curve = curve_start[b];
        out.offsets[curve] = lo;
        out.source_beam[curve] = beam;
        out.positions[lo] = pc.positions[order[lo]];
        for (Index k = lo + 1; k < hi; ++k) {
          const Vec3& prev = out.positions[k - 1];
          const Vec3& cur = pc.positions[order[k]];
          if (distance(prev, cur) > cfg.effective_delta(beam, prev)) {
            ++curve;
            out.offsets[curve] = k;
            out.source_beam[curve] = beam;
          }
          out.positions[k] = cur;
        }
      },
      2);
  return out;
}

GeodesicTable geodesic_lengths(const CurveCloud& cc) {
  count_op(Op::kGeodesicLengths);
  check_structure(cc);
  GeodesicTable g;
  g.cumlen.resize(cc.num_points());
  internal::parallel_for(cc.num_curves(), [&](std::size_t j) {
    const Index lo = cc.curve_begin(j);
    const Index hi = cc.curve_end(j);
    double acc = 0.0;
    g.cumlen[lo] = 0.0;
    for (Index i = lo + 1; i < hi; ++i) {
      acc += distance(cc.positions[i - 1], cc.positions[i]);
      g.cumlen[i] = acc;
    }
  });
  return g;
}

std::vector<Violation> validate(const CurveCloud& cc,
                                const ConversionConfig& cfg) {
  std::vector<Violation> out;
  auto report = [&](Violation::Kind kind, std::size_t curve, std::size_t index,
                    const std::string& msg) {
    out.push_back(Violation{kind, curve, index, msg});
  };

  const std::size_t n = cc.positions.size();
  bool offsets_ok = true;
  if (cc.offsets.empty()) {
    report(Violation::Kind::kOffsetTable, 0, 0, "offset table is empty");
    return out;
  }
  if (cc.offsets.front() != 0) {
    offsets_ok = false;
    report(Violation::Kind::kOffsetTable, 0, 0, "offsets[0] is not 0");
  }
  if (cc.offsets.back() != n) {
    offsets_ok = false;
    std::ostringstream msg;
    msg << "offsets[" << cc.offsets.size() - 1 << "] = " << cc.offsets.back()
        << " but the cloud has " << n << " points";
    report(Violation::Kind::kOffsetTable, cc.offsets.size() - 1,
           cc.offsets.size() - 1, msg.str());
  }
  for (std::size_t j = 1; j < cc.offsets.size(); ++j) {
    if (cc.offsets[j] <= cc.offsets[j - 1]) {
      offsets_ok = false;
      std::ostringstream msg;
      msg << "offsets[" << j << "] = " << cc.offsets[j]
          << " does not exceed offsets[" << j - 1 << "] = " << cc.offsets[j - 1]
          << (cc.offsets[j] == cc.offsets[j - 1] ? " (empty curve)" : "");
      report(Violation::Kind::kNonMonotonic, j - 1, j, msg.str());
    }
  }
  const std::size_t m = cc.offsets.size() - 1;
  bool beams_ok = cc.source_beam.size() == m;
  if (!beams_ok) {
    report(Violation::Kind::kBeamTable, 0, 0,
           "source_beam has " + std::to_string(cc.source_beam.size()) +
               " entries for " + std::to_string(m) + " curves");
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      const std::uint32_t b = cc.source_beam[j];
      if (b < 1 || (cfg.delta.size() > 1 && b > cfg.delta.size())) {
        beams_ok = false;
        report(Violation::Kind::kBeamTable, j, j,
               "curve " + std::to_string(j) + " has beam id " +
                   std::to_string(b) + " without a threshold");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_finite(cc.positions[i])) {
      report(Violation::Kind::kNonFinite, 0, i,
             "non-finite coordinate at point " + std::to_string(i));
    }
  }
  if (!offsets_ok || !beams_ok) return out;

  for (std::size_t j = 0; j < m; ++j) {
    const std::uint32_t beam = cc.source_beam[j];
    for (Index i = cc.curve_begin(j) + 1; i < cc.curve_end(j); ++i) {
      const Vec3& prev = cc.positions[i - 1];
      const double len = distance(prev, cc.positions[i]);
      const double limit = cfg.effective_delta(beam, prev);
      if (len > limit) {
        std::ostringstream msg;
        msg << "curve " << j << " edge (" << i - 1 << ", " << i
            << ") has length " << len << " > " << limit;
        report(Violation::Kind::kEdgeTooLong, j, i - 1, msg.str());
      }
    }
  }
  return out;
}

}  // namespace curvecloud
