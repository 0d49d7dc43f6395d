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

#include "curvecloud/scan_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <random>

#include "parallel.hpp"

namespace curvecloud {
namespace {

using nlohmann::json;

constexpr double kMinHit = 1e-9;
// Consecutive traversals without a single hit before the scene is declared
// invisible.
constexpr std::size_t kEmptyTraversalLimit = 256;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class TraversalRng {
 public:
  TraversalRng(std::uint64_t seed, std::uint64_t traversal)
      : engine_(splitmix64(seed ^ splitmix64(traversal))) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

 private:
  std::mt19937_64 engine_;
};

// Base-2 radical inverse of n; 1/2, 1/4, 3/4, 1/8, ... for n = 1, 2, 3, 4.
double van_der_corput(std::uint64_t n) {
  double result = 0.0;
  double place = 0.5;
  while (n != 0) {
    if (n & 1) result += place;
    n >>= 1;
    place *= 0.5;
  }
  return result;
}

using Pixel = std::array<double, 2>;  // (column, row), continuous

std::size_t line_samples(const ScanConfig& cfg) {
  return cfg.resolution / cfg.stride;
}

double lissajous_step(const ScanConfig& cfg) {
  const double half = 0.5 * static_cast<double>(cfg.resolution);
  return static_cast<double>(cfg.stride) /
         (half * std::hypot(cfg.lissajous_a, cfg.lissajous_b));
}

std::size_t lissajous_samples(const ScanConfig& cfg) {
  return static_cast<std::size_t>(
      std::ceil(2.0 * std::numbers::pi / lissajous_step(cfg)));
}

// Upper bound on samples in one traversal; sets the timestamp spacing.
std::size_t samples_bound(const ScanConfig& cfg) {
  switch (cfg.pattern) {
    case Pattern::kParallel:
    case Pattern::kGrid:
      return line_samples(cfg);
    case Pattern::kRandom:
      return static_cast<std::size_t>(std::ceil(
                 std::numbers::sqrt2 * static_cast<double>(cfg.resolution) /
                 static_cast<double>(cfg.stride))) +
             1;
    case Pattern::kLissajous:
      return lissajous_samples(cfg);
  }
  return 0;
}

std::vector<Pixel> traversal_pixels(const ScanConfig& cfg, std::size_t k) {
  const double res = static_cast<double>(cfg.resolution);
  const double stride = static_cast<double>(cfg.stride);
  std::vector<Pixel> px;
  auto straight = [&](bool horizontal, double at) {
    const std::size_t n = line_samples(cfg);
    px.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double along = (static_cast<double>(s) + 0.5) * stride;
      px.push_back(horizontal ? Pixel{along, at} : Pixel{at, along});
    }
  };
  switch (cfg.pattern) {
    case Pattern::kParallel:
      straight(true, res * van_der_corput(k + 1));
      break;
    case Pattern::kGrid:
      straight(k % 2 == 0, res * van_der_corput(k / 2 + 1));
      break;
    case Pattern::kRandom: {
      TraversalRng rng(cfg.seed, k);
      const double i = rng.uniform() * res;
      const double j = rng.uniform() * res;
      const double theta = rng.uniform() * std::numbers::pi;
      const double dx = std::cos(theta);
      const double dy = std::sin(theta);
      double t0 = -std::numeric_limits<double>::infinity();
      double t1 = std::numeric_limits<double>::infinity();
      auto clip = [&](double start, double dir) {
        if (std::abs(dir) < 1e-12) return;
        double a = (0.0 - start) / dir;
        double b = (res - start) / dir;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
      };
      clip(i, dx);
      clip(j, dy);
      for (double t = t0 + 0.5 * stride; t < t1; t += stride) {
        px.push_back(Pixel{i + t * dx, j + t * dy});
      }
      break;
    }
    case Pattern::kLissajous: {
      TraversalRng rng(cfg.seed, k);
      const double phi1 = rng.uniform() * 2.0 * std::numbers::pi;
      const double phi2 = rng.uniform() * 2.0 * std::numbers::pi;
      const double half = 0.5 * res;
      const double step = lissajous_step(cfg);
      const std::size_t n = lissajous_samples(cfg);
      px.reserve(n);
      for (std::size_t s = 0; s < n; ++s) {
        const double tau = static_cast<double>(s) * step;
        px.push_back(Pixel{half * (1.0 + std::sin(cfg.lissajous_a * tau + phi1)),
                           half * (1.0 + std::sin(cfg.lissajous_b * tau + phi2))});
      }
      break;
    }
  }
  return px;
}

std::optional<double> intersect(const Sphere& s, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - s.center;
  const double b = dot(d, oc);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t <= kMinHit) t = -b + root;
  if (t <= kMinHit) return std::nullopt;
  return t;
}

std::optional<double> intersect(const Box& box, const Vec3& o, const Vec3& d) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};
  for (int a = 0; a < 3; ++a) {
    if (ds[a] == 0.0) {
      if (os[a] < lo[a] || os[a] > hi[a]) return std::nullopt;
      continue;
    }
    double t1 = (lo[a] - os[a]) / ds[a];
    double t2 = (hi[a] - os[a]) / ds[a];
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_far < t_near || t_far <= kMinHit) return std::nullopt;
  return t_near > kMinHit ? t_near : t_far;
}

std::optional<double> intersect(const Plane& p, const Vec3& o, const Vec3& d) {
  const double denom = dot(p.normal, d);
  if (denom == 0.0) return std::nullopt;
  const double t = (p.offset - dot(p.normal, o)) / denom;
  if (!(t > kMinHit)) return std::nullopt;
  return t;
}

Vec3 ray_direction(const SensorPose& pose, double focal, double half,
                   const Pixel& px) {
  const Vec3 local{(px[0] - half) / focal, (px[1] - half) / focal, 1.0};
  const Vec3 world = rotate(pose.orientation, local);
  return world / norm(world);
}

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string(what) + " must be an array of 3 numbers");
  }
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

Vec3 rotate(const Quaternion& q, const Vec3& v) {
  // v + 2 w (u x v) + 2 u x (u x v), with u the vector part.
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 uv = cross(u, v);
  const Vec3 uuv = cross(u, uv);
  return v + 2.0 * q.w * uv + 2.0 * uuv;
}

void check_scene(const Scene& scene) {
  if (scene.primitives.empty()) throw InvalidInput("scene has no primitives");
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const std::string where = "primitive " + std::to_string(i);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            if (!is_finite(p.center) || !(p.radius > 0.0) ||
                !std::isfinite(p.radius)) {
              throw InvalidInput(where + ": sphere needs a finite center and "
                                         "positive radius");
            }
          } else if constexpr (std::is_same_v<T, Box>) {
            if (!is_finite(p.min) || !is_finite(p.max) || !(p.min.x < p.max.x) ||
                !(p.min.y < p.max.y) || !(p.min.z < p.max.z)) {
              throw InvalidInput(where + ": box needs finite min < max");
            }
          } else {
            if (!is_finite(p.normal) || std::abs(norm(p.normal) - 1.0) > 1e-9 ||
                !std::isfinite(p.offset)) {
              throw InvalidInput(where + ": plane needs a unit normal");
            }
          }
        },
        scene.primitives[i]);
  }
  const Quaternion& q = scene.sensor.orientation;
  const double qn = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (!std::isfinite(qn) || std::abs(qn - 1.0) > 1e-9) {
    throw InvalidInput("sensor orientation must be a unit quaternion");
  }
  if (!is_finite(scene.sensor.origin)) {
    throw InvalidInput("sensor origin must be finite");
  }
  if (!(scene.sensor.fov_deg > 0.0 && scene.sensor.fov_deg < 180.0)) {
    throw InvalidInput("field of view must lie in (0, 180) degrees");
  }
}

Scene parse_scene(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene is not valid JSON: ") + e.what());
  }
  Scene scene;
  try {
    if (j.contains("sensor")) {
      const json& s = j.at("sensor");
      if (s.contains("origin")) scene.sensor.origin = vec3_from(s.at("origin"), "origin");
      if (s.contains("orientation")) {
        const json& q = s.at("orientation");
        if (!q.is_array() || q.size() != 4) {
          throw FormatError("orientation must be [w, x, y, z]");
        }
        Quaternion r{q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                     q[3].get<double>()};
        const double n = std::sqrt(r.w * r.w + r.x * r.x + r.y * r.y + r.z * r.z);
        if (!(n > 0.0) || !std::isfinite(n)) {
          throw InvalidInput("orientation quaternion is zero or non-finite");
        }
        scene.sensor.orientation = Quaternion{r.w / n, r.x / n, r.y / n, r.z / n};
      }
      if (s.contains("fov_deg")) scene.sensor.fov_deg = s.at("fov_deg").get<double>();
    }
    for (const json& p : j.at("primitives")) {
      const auto type = p.at("type").get<std::string>();
      if (type == "sphere") {
        scene.primitives.emplace_back(
            Sphere{vec3_from(p.at("center"), "center"), p.at("radius").get<double>()});
      } else if (type == "box") {
        scene.primitives.emplace_back(
            Box{vec3_from(p.at("min"), "min"), vec3_from(p.at("max"), "max")});
      } else if (type == "plane") {
        const Vec3 n = vec3_from(p.at("normal"), "normal");
        const double len = norm(n);
        if (!(len > 0.0) || !std::isfinite(len)) {
          throw InvalidInput("plane normal is zero or non-finite");
        }
        scene.primitives.emplace_back(
            Plane{n / len, p.at("offset").get<double>() / len});
      } else {
        throw FormatError("unknown primitive type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed scene: ") + e.what());
  }
  check_scene(scene);
  return scene;
}

std::string scene_to_json(const Scene& scene) {
  json j;
  const Quaternion& q = scene.sensor.orientation;
  j["sensor"] = {{"origin", vec3_to(scene.sensor.origin)},
                 {"orientation", json::array({q.w, q.x, q.y, q.z})},
                 {"fov_deg", scene.sensor.fov_deg}};
  j["primitives"] = json::array();
  for (const Primitive& prim : scene.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            j["primitives"].push_back(
                {{"type", "sphere"}, {"center", vec3_to(p.center)}, {"radius", p.radius}});
          } else if constexpr (std::is_same_v<T, Box>) {
            j["primitives"].push_back(
                {{"type", "box"}, {"min", vec3_to(p.min)}, {"max", vec3_to(p.max)}});
          } else {
            j["primitives"].push_back(
                {{"type", "plane"}, {"normal", vec3_to(p.normal)}, {"offset", p.offset}});
          }
        },
        prim);
  }
  return j.dump(2);
}

Scene default_plane_scene() {
  Scene scene;
  scene.primitives.emplace_back(Plane{Vec3{0.0, 0.0, 1.0}, 5.0});
  return scene;
}

Scene benchmark_scene() {
  Scene scene;
  scene.primitives.emplace_back(Plane{Vec3{0.0, 1.0, 0.0}, 0.3});  // floor
  scene.primitives.emplace_back(Plane{Vec3{0.0, 0.0, 1.0}, 6.0});  // back wall
  scene.primitives.emplace_back(Box{Vec3{-0.8, -0.2, 1.6}, Vec3{-0.4, 0.3, 2.0}});
  scene.primitives.emplace_back(Box{Vec3{0.5, -0.4, 2.8}, Vec3{1.0, 0.3, 3.2}});
  scene.primitives.emplace_back(Box{Vec3{-1.8, -0.6, 4.0}, Vec3{-1.0, 0.3, 4.4}});
  scene.primitives.emplace_back(Sphere{Vec3{0.1, 0.1, 1.2}, 0.2});
  scene.primitives.emplace_back(Sphere{Vec3{-0.2, -0.1, 2.4}, 0.4});
  scene.primitives.emplace_back(Sphere{Vec3{1.4, 0.0, 3.6}, 0.3});
  return scene;
}

std::optional<Hit> cast_ray(const Scene& scene, const Vec3& origin,
                            const Vec3& direction) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const auto t = std::visit(
        [&](const auto& p) { return intersect(p, origin, direction); },
        scene.primitives[i]);
    if (t && (!best || *t < best->t)) best = Hit{*t, i};
  }
  return best;
}

double surface_distance(const Primitive& primitive, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return std::abs(distance(p, s.center) - s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          const double ps[3] = {p.x, p.y, p.z};
          const double lo[3] = {s.min.x, s.min.y, s.min.z};
          const double hi[3] = {s.max.x, s.max.y, s.max.z};
          double outside = 0.0;
          double inside = std::numeric_limits<double>::infinity();
          for (int a = 0; a < 3; ++a) {
            const double excess = std::max({lo[a] - ps[a], 0.0, ps[a] - hi[a]});
            outside += excess * excess;
            inside = std::min({inside, ps[a] - lo[a], hi[a] - ps[a]});
          }
          return outside > 0.0 ? std::sqrt(outside) : inside;
        } else {
          return std::abs(dot(s.normal, p) - s.offset);
        }
      },
      primitive);
}

Pattern parse_pattern(std::string_view name) {
  if (name == "parallel") return Pattern::kParallel;
  if (name == "grid") return Pattern::kGrid;
  if (name == "random") return Pattern::kRandom;
  if (name == "lissajous") return Pattern::kLissajous;
  throw ConfigError("unknown scan pattern '" + std::string(name) + "'");
}

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::kParallel:
      return "parallel";
    case Pattern::kGrid:
      return "grid";
    case Pattern::kRandom:
      return "random";
    case Pattern::kLissajous:
      return "lissajous";
  }
  return "?";
}

void check_scan_config(const ScanConfig& cfg) {
  if (cfg.beams == 0) throw ConfigError("beams must be at least 1");
  if (cfg.budget == 0) throw ConfigError("point budget must be at least 1");
  if (cfg.stride == 0) throw ConfigError("stride must be at least 1");
  if (cfg.resolution < cfg.stride) {
    throw ConfigError("resolution must be at least the stride");
  }
  if (cfg.max_traversals == 0) throw ConfigError("max_traversals must be positive");
  if (cfg.pattern == Pattern::kLissajous &&
      !(cfg.lissajous_a > 0.0 && cfg.lissajous_b > 0.0)) {
    throw ConfigError("lissajous frequencies must be positive");
  }
}

SimulationResult simulate_detailed(const Scene& scene, const ScanConfig& cfg) {
  check_scene(scene);
  check_scan_config(cfg);
  const double half = 0.5 * static_cast<double>(cfg.resolution);
  const double focal =
      half / std::tan(0.5 * scene.sensor.fov_deg * std::numbers::pi / 180.0);
  const double period = static_cast<double>(samples_bound(cfg));

  struct Sample {
    Vec3 point;
    std::uint32_t primitive;
    std::uint32_t index;
  };

  SimulationResult out;
  out.cloud.beam_count = cfg.beams;
  std::size_t batch = 8;
  std::size_t next = 0;
  std::size_t fruitless = 0;
  while (out.cloud.size() < cfg.budget && next < cfg.max_traversals) {
    const std::size_t count = std::min(batch, cfg.max_traversals - next);
    std::vector<std::vector<Sample>> hits(count);
    internal::parallel_for(
        count,
        [&](std::size_t b) {
          const auto px = traversal_pixels(cfg, next + b);
          auto& dst = hits[b];
          for (std::size_t s = 0; s < px.size(); ++s) {
            const Vec3 dir = ray_direction(scene.sensor, focal, half, px[s]);
            const auto hit = cast_ray(scene, scene.sensor.origin, dir);
            if (!hit) continue;
            dst.push_back(Sample{scene.sensor.origin + hit->t * dir,
                                 static_cast<std::uint32_t>(hit->primitive),
                                 static_cast<std::uint32_t>(s)});
          }
        },
        1);
    for (std::size_t b = 0; b < count && out.cloud.size() < cfg.budget; ++b) {
      const std::size_t k = next + b;
      out.traversals = k + 1;
      fruitless = hits[b].empty() ? fruitless + 1 : 0;
      const auto beam = static_cast<std::uint32_t>(k % cfg.beams) + 1;
      for (const Sample& s : hits[b]) {
        if (out.cloud.size() == cfg.budget) break;
        out.cloud.push_back(s.point,
                            static_cast<double>(k) * period + s.index, beam);
        out.traversal.push_back(static_cast<std::uint32_t>(k));
        out.primitive.push_back(s.primitive);
      }
    }
    next += count;
    if (out.cloud.empty() && fruitless >= kEmptyTraversalLimit) break;
    batch = std::min<std::size_t>(batch * 2, 256);
  }
  if (out.cloud.empty()) {
    throw EmptyScan("empty scan: no ray hit the scene in " +
                    std::to_string(next) + " traversals");
  }
  return out;
}

PointCloud simulate(const Scene& scene, const ScanConfig& cfg) {
  return simulate_detailed(scene, cfg).cloud;
}

PatternStats pattern_stats(const PointCloud& pc, const ConversionConfig& cfg) {
  PatternStats stats;
  stats.per_beam_counts.assign(pc.beam_count, 0);
  if (pc.empty()) return stats;
  const CurveCloud cc = build_curve_cloud(pc, cfg);
  stats.points = pc.size();
  stats.curves = cc.num_curves();
  for (std::uint32_t b : pc.beam_ids) ++stats.per_beam_counts[b - 1];
  double total_length = 0.0;
  for (std::size_t i = 0; i < cc.num_curves(); ++i) {
    for (Index p = cc.curve_begin(i) + 1; p < cc.curve_end(i); ++p) {
      total_length += distance(cc.positions[p - 1], cc.positions[p]);
    }
  }
  stats.mean_curve_points =
      static_cast<double>(stats.points) / static_cast<double>(stats.curves);
  stats.mean_curve_length = total_length / static_cast<double>(stats.curves);
  return stats;
}

}  // namespace curvecloud
