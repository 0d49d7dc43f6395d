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

// curvecloud: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 bad input data or configuration,
// 3 internal error.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bench.hpp"
#include "curvecloud/backbone.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/io.hpp"
#include "curvecloud/params_io.hpp"
#include "curvecloud/scan_sim.hpp"
#include "curvecloud/threading.hpp"
#include "report.hpp"

namespace curvecloud::cli {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string read_text(const std::string& path) {
  const auto bytes = io::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

// Builtin profile name or path to a JSON config.
BackboneConfig load_config(const std::string& name) {
  if (name == "toy") return toy_profile();
  if (name == "production") return production_profile();
  return parse_backbone_config(read_text(name));
}

Vec3 parse_vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw ConfigError(std::string(what) + " needs 3 values");
  return Vec3{v[0], v[1], v[2]};
}

double mean_curve_length(const CurveCloud& cc) {
  if (cc.num_curves() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    for (Index i = cc.curve_begin(j) + 1; i < cc.curve_end(j); ++i) {
      total += distance(cc.positions[i - 1], cc.positions[i]);
    }
  }
  return total / static_cast<double>(cc.num_curves());
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string scene;
  std::string pattern = "parallel";
  std::size_t points = 2048;
  std::uint64_t seed = 0;
  std::uint32_t beams = 1;
  std::size_t stride = 4;
  std::size_t resolution = 2048;
  std::string out;
};

Report run_simulate(const SimulateArgs& a) {
  const Scene scene = parse_scene(read_text(a.scene));
  ScanConfig cfg;
  cfg.pattern = parse_pattern(a.pattern);
  cfg.budget = a.points;
  cfg.seed = a.seed;
  cfg.beams = a.beams;
  cfg.stride = a.stride;
  cfg.resolution = a.resolution;
  const SimulationResult sim = simulate_detailed(scene, cfg);
  io::write_scan(a.out, sim.cloud);
  Report r("simulate");
  r.fields()["points"] = sim.cloud.size();
  r.fields()["beams"] = sim.cloud.beam_count;
  r.fields()["traversals"] = sim.traversals;
  r.fields()["pattern"] = pattern_name(cfg.pattern);
  r.fields()["out"] = a.out;
  return r;
}

// --- convert ----------------------------------------------------------------

struct ConvertArgs {
  std::string in;
  std::string out;
  std::vector<double> delta;
  std::string preset;
  bool range_scaling = false;
  std::vector<double> sensor_origin;
  double reference_range = 1.0;
};

Report run_convert(const ConvertArgs& a) {
  ConversionConfig cfg;
  if (a.preset == "driving") {
    cfg = presets::driving();
  } else if (a.preset == "object") {
    cfg = presets::object();
  } else if (a.preset == "multi-sensor") {
    cfg = presets::multi_sensor_rig();
  }
  if (!a.delta.empty()) cfg.delta = a.delta;
  if (a.range_scaling) cfg.range_scaling = true;
  if (!a.sensor_origin.empty()) {
    cfg.sensor_origin = parse_vec3(a.sensor_origin, "--sensor-origin");
  }
  if (a.reference_range != 1.0) cfg.reference_range = a.reference_range;

  const PointCloud pc = io::read_scan(a.in);
  const CurveCloud cc = build_curve_cloud(pc, cfg);
  io::write_curve_cloud(a.out, cc);
  Report r("convert");
  r.fields()["N"] = cc.num_points();
  r.fields()["M"] = cc.num_curves();
  r.fields()["mean_curve_points"] =
      cc.num_curves() ? static_cast<double>(cc.num_points()) /
                            static_cast<double>(cc.num_curves())
                      : 0.0;
  r.fields()["mean_curve_length"] = mean_curve_length(cc);
  r.fields()["out"] = a.out;
  return r;
}

// --- fps --------------------------------------------------------------------

struct FpsArgs {
  std::string in;
  double epsilon = 0.0;
  std::string out;
  std::string indices_out;
};

Report run_fps(const FpsArgs& a) {
  const CurveCloud cc = io::read_curve_cloud(a.in);
  const GeodesicTable g = geodesic_lengths(cc);
  const Selection sel = fps_1d(cc, g, SamplingConfig{a.epsilon});
  io::write_curve_cloud(a.out, restrict_to(cc, sel.indices));
  if (!a.indices_out.empty()) {
    std::ofstream f(a.indices_out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + a.indices_out + "' for writing");
    f << "index\n";
    for (Index i : sel.indices) f << i << '\n';
    if (!f) throw Error("failed writing '" + a.indices_out + "'");
  }
  Report r("fps");
  r.fields()["N"] = cc.num_points();
  r.fields()["M"] = cc.num_curves();
  r.fields()["L"] = sel.indices.size();
  r.fields()["epsilon"] = a.epsilon;
  r.fields()["out"] = a.out;
  return r;
}

// --- group ------------------------------------------------------------------

struct GroupArgs {
  std::string in;
  double radius = 0.0;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_neighbors;
  std::string out;
};

Report run_group(const GroupArgs& a) {
  const CurveCloud cc = io::read_curve_cloud(a.in);
  const GeodesicTable g = geodesic_lengths(cc);
  const Selection sel =
      fps_1d(cc, g, SamplingConfig{a.epsilon.value_or(a.radius)});
  const Neighborhoods groups =
      group_curve(cc, g, sel.indices, GroupingConfig{a.radius, a.max_neighbors});
  std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + a.out + "' for writing");
  f << "center,member\n";
  std::size_t largest = 0;
  for (std::size_t i = 0; i < sel.indices.size(); ++i) {
    const auto members = groups.of(i);
    largest = std::max(largest, members.size());
    for (Index m : members) f << sel.indices[i] << ',' << m << '\n';
  }
  if (!f) throw Error("failed writing '" + a.out + "'");
  Report r("group");
  r.fields()["N"] = cc.num_points();
  r.fields()["centers"] = sel.indices.size();
  r.fields()["members"] = groups.members.size();
  r.fields()["mean_group_size"] =
      sel.indices.empty() ? 0.0
                          : static_cast<double>(groups.members.size()) /
                                static_cast<double>(sel.indices.size());
  r.fields()["max_group_size"] = largest;
  r.fields()["out"] = a.out;
  return r;
}

// --- init-params ------------------------------------------------------------

struct InitArgs {
  std::string config = "toy";
  std::uint64_t seed = 0;
  std::string out;
  bool zero_head = false;
};

Report run_init(const InitArgs& a) {
  const BackboneConfig cfg = load_config(a.config);
  BackboneParams params = init_backbone_params(cfg, a.seed);
  if (a.zero_head) zero_head(params);
  save_params(a.out, cfg, params);
  std::size_t count = 0;
  for (const auto& t : flatten_params(params)) count += t.value.values().size();
  Report r("init-params");
  r.fields()["parameters"] = count;
  r.fields()["seed"] = a.seed;
  r.fields()["zero_head"] = a.zero_head;
  r.fields()["out"] = a.out;
  return r;
}

// --- forward ----------------------------------------------------------------

struct ForwardArgs {
  std::string in;
  std::string config;
  std::string params;
  std::string features;
  std::string out;
  std::string logits_out;
};

Report run_forward(const ForwardArgs& a) {
  const Model model = load_params(a.params);
  BackboneConfig cfg = a.config.empty() ? model.config : load_config(a.config);
  // Ablation switches may differ from the saved config; structure may not.
  BackboneConfig structural = cfg;
  structural.ablation = model.config.ablation;
  if (backbone_config_to_json(structural) !=
      backbone_config_to_json(model.config)) {
    throw ConfigError("--config does not match the config the parameters were "
                      "created for");
  }
  const CurveCloud cc = io::read_curve_cloud(a.in);
  FeatureMap feats = default_input_features(cc);
  if (!a.features.empty()) {
    std::ifstream f(a.features, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + a.features + "' for reading");
    feats = io::read_feature_map(f);
  }
  const SegmentationOutput out =
      forward(cc, geodesic_lengths(cc), feats, cfg, model.params);
  io::write_labels_csv(a.out, out.labels);
  if (!a.logits_out.empty()) {
    std::ofstream f(a.logits_out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + a.logits_out + "' for writing");
    io::write_feature_map(f, out.logits);
    if (!f) throw Error("failed writing '" + a.logits_out + "'");
  }
  std::vector<std::size_t> histogram(cfg.num_classes, 0);
  for (auto l : out.labels) ++histogram[l];
  Report r("forward");
  r.fields()["N"] = cc.num_points();
  r.fields()["classes"] = cfg.num_classes;
  r.fields()["label_counts"] = histogram;
  r.fields()["out"] = a.out;
  return r;
}

// --- export-ply -------------------------------------------------------------

struct ExportArgs {
  std::string in;
  std::string labels;
  std::string out;
};

Report run_export(const ExportArgs& a) {
  const CurveCloud cc = io::read_curve_cloud(a.in);
  const auto labels = io::read_labels_csv(a.labels);
  if (labels.size() != cc.num_points()) {
    throw InvalidInput(std::to_string(labels.size()) + " labels for " +
                       std::to_string(cc.num_points()) + " points");
  }
  io::write_ply(a.out, cc.positions, labels);
  Report r("export-ply");
  r.fields()["vertices"] = cc.num_points();
  r.fields()["out"] = a.out;
  return r;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string op;
  std::vector<double> sizes{1e4, 1e5, 1e6};
  std::size_t repeat = 3;
};

Report run_bench_command(const BenchArgs& a) {
  std::vector<std::size_t> sizes;
  for (double s : a.sizes) {
    if (!(s >= 1.0) || s != std::floor(s) || s > 4e9) {
      throw ConfigError("sizes must be positive integers");
    }
    sizes.push_back(static_cast<std::size_t>(s));
  }
  const auto points = run_bench(a.op, sizes, a.repeat);
  Report r("bench");
  r.fields()["op"] = a.op;
  r.fields()["repeat"] = a.repeat;
  r.fields()["threads"] = thread_count();
  auto& results = r.fields()["results"] = nlohmann::json::array();
  for (const auto& p : points) {
    results.push_back({{"size", p.size},
                       {"median_seconds", p.median_seconds},
                       {"samples", p.samples},
                       {"output_size", p.output_size}});
  }
  return r;
}

int run(int argc, char** argv) {
  CLI::App app{"Curve cloud toolkit: simulate scans, build curve clouds, run "
               "curve operations and segmentation inference."};
  app.require_subcommand(1);
  bool as_json = false;
  int threads = 0;
  app.add_flag("--json", as_json, "Print a JSON report on stdout");
  app.add_option("--threads", threads,
                 "Worker threads (default: all cores)")
      ->envname("CURVECLOUD_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.fallthrough();

  std::function<Report()> action;

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a laser scan of an analytic scene");
  c_sim->add_option("--scene", sim.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--pattern", sim.pattern, "Traversal pattern")
      ->check(CLI::IsMember({"parallel", "grid", "random", "lissajous"}))
      ->capture_default_str();
  c_sim->add_option("--points", sim.points, "Point budget")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  c_sim->add_option("--beams", sim.beams, "Beam count")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_sim->add_option("--stride", sim.stride, "Pixels between samples")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_sim->add_option("--resolution", sim.resolution, "Virtual image size")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_sim->add_option("--out", sim.out, "Output scan (.csv or binary)")->required();
  c_sim->callback([&] { action = [&] { return run_simulate(sim); }; });

  ConvertArgs conv;
  auto* c_conv = app.add_subcommand("convert", "Split a scan into a curve cloud");
  c_conv->add_option("--in", conv.in, "Input scan (.csv or binary)")
      ->required()->check(CLI::ExistingFile);
  c_conv->add_option("--delta", conv.delta,
                     "Split threshold, or one per beam (comma separated)")
      ->delimiter(',');
  c_conv->add_option("--preset", conv.preset, "Threshold preset")
      ->check(CLI::IsMember({"driving", "object", "multi-sensor"}));
  c_conv->add_flag("--range-scaling", conv.range_scaling,
                   "Scale the threshold with sqrt(range)");
  c_conv->add_option("--sensor-origin", conv.sensor_origin, "x,y,z")
      ->delimiter(',')->expected(3);
  c_conv->add_option("--reference-range", conv.reference_range,
                     "Range at which the threshold is unscaled")
      ->check(CLI::PositiveNumber);
  c_conv->add_option("--out", conv.out, "Output curve cloud")->required();
  c_conv->callback([&] { action = [&] { return run_convert(conv); }; });

  FpsArgs fps;
  auto* c_fps = app.add_subcommand("fps", "Curve farthest point sampling");
  c_fps->add_option("--in", fps.in, "Input curve cloud")->required()->check(CLI::ExistingFile);
  c_fps->add_option("--epsilon", fps.epsilon, "Sampling spacing")->required();
  c_fps->add_option("--out", fps.out, "Selected points as a curve cloud")->required();
  c_fps->add_option("--indices-out", fps.indices_out, "Selected indices as CSV");
  c_fps->callback([&] { action = [&] { return run_fps(fps); }; });

  GroupArgs grp;
  auto* c_grp = app.add_subcommand("group", "Curve grouping around sampled centers");
  c_grp->add_option("--in", grp.in, "Input curve cloud")->required()->check(CLI::ExistingFile);
  c_grp->add_option("--radius", grp.radius, "Geodesic radius")->required();
  c_grp->add_option("--epsilon", grp.epsilon, "Center spacing (default: radius)");
  c_grp->add_option("--max-neighbors", grp.max_neighbors, "Neighborhood cap")
      ->check(CLI::PositiveNumber);
  c_grp->add_option("--out", grp.out, "Neighborhoods as center,member CSV")->required();
  c_grp->callback([&] { action = [&] { return run_group(grp); }; });

  InitArgs init;
  auto* c_init = app.add_subcommand("init-params", "Create backbone parameters");
  c_init->add_option("--config", init.config, "Config JSON, 'toy' or 'production'")
      ->capture_default_str();
  c_init->add_option("--seed", init.seed, "Random seed")->capture_default_str();
  c_init->add_option("--out", init.out, "Parameter manifest (.json)")->required();
  c_init->add_flag("--zero-head", init.zero_head, "Zero the final head layer");
  c_init->callback([&] { action = [&] { return run_init(init); }; });

  ForwardArgs fwd;
  auto* c_fwd = app.add_subcommand("forward", "Run segmentation inference");
  c_fwd->add_option("--in", fwd.in, "Input curve cloud")->required()->check(CLI::ExistingFile);
  c_fwd->add_option("--config", fwd.config,
                    "Config JSON, 'toy' or 'production' (default: from params)");
  c_fwd->add_option("--params", fwd.params, "Parameter manifest")
      ->required()->check(CLI::ExistingFile);
  c_fwd->add_option("--features", fwd.features, "Input features (default: xyz)");
  c_fwd->add_option("--out", fwd.out, "Labels CSV")->required();
  c_fwd->add_option("--logits-out", fwd.logits_out, "Logits as a feature map");
  c_fwd->callback([&] { action = [&] { return run_forward(fwd); }; });

  ExportArgs exp;
  auto* c_exp = app.add_subcommand("export-ply", "Write a colored PLY of labeled points");
  c_exp->add_option("--in", exp.in, "Curve cloud")->required()->check(CLI::ExistingFile);
  c_exp->add_option("--labels", exp.labels, "Labels CSV")->required()->check(CLI::ExistingFile);
  c_exp->add_option("--out", exp.out, "Output PLY")->required();
  c_exp->callback([&] { action = [&] { return run_export(exp); }; });

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time an operation over input sizes");
  c_bench->add_option("--op", bench.op, "Operation")->required()->check(CLI::IsMember(kBenchOps));
  c_bench->add_option("--sizes", bench.sizes, "Sizes, e.g. 1e4,1e5,1e6")
      ->delimiter(',')->check(CLI::PositiveNumber);
  c_bench->add_option("--repeat", bench.repeat, "Runs per size")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_bench->callback([&] { action = [&] { return run_bench_command(bench); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  set_thread_count(threads);
  try {
    action().print(std::cout, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}

}  // namespace
}  // namespace curvecloud::cli

int main(int argc, char** argv) { return curvecloud::cli::run(argc, argv); }
