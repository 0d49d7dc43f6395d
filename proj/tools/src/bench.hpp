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

#ifndef CURVECLOUD_TOOLS_BENCH_HPP_
#define CURVECLOUD_TOOLS_BENCH_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace curvecloud::cli {

inline const std::vector<std::string> kBenchOps = {
    "fps1d", "fpseuclid", "convert", "groupcurve", "ball3d", "forward"};

struct BenchPoint {
  std::size_t size = 0;
  std::vector<double> samples;  // seconds, one per repeat
  double median_seconds = 0.0;
  std::size_t output_size = 0;  // selected points, curves, neighborhoods...
};

// Times `op` on synthetic data of each size. Data preparation is excluded.
std::vector<BenchPoint> run_bench(const std::string& op,
                                  const std::vector<std::size_t>& sizes,
                                  std::size_t repeat);

}  // namespace curvecloud::cli

#endif  // CURVECLOUD_TOOLS_BENCH_HPP_
