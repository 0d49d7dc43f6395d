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

#ifndef CURVECLOUD_SRC_PARALLEL_HPP_
#define CURVECLOUD_SRC_PARALLEL_HPP_

#include <omp.h>

#include <cstddef>
#include <cstdint>

#include "curvecloud/threading.hpp"

namespace curvecloud::internal {

// Runs body(i) for i in [0, n). Each i must write only to its own output
// slots, which makes results independent of the thread count. Bodies must not
// throw.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_parallel = 64) {
  const int threads = thread_count();
  if (threads <= 1 || n < min_parallel) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace curvecloud::internal

#endif  // CURVECLOUD_SRC_PARALLEL_HPP_
