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

#include <omp.h>

#include <atomic>

#include "curvecloud/threading.hpp"

namespace curvecloud {
namespace {
std::atomic<int> g_threads{0};
}  // namespace

void set_thread_count(int threads) { g_threads.store(threads < 1 ? 0 : threads); }

int thread_count() {
  const int t = g_threads.load();
  return t > 0 ? t : omp_get_num_procs();
}

}  // namespace curvecloud
