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

#ifndef CURVECLOUD_THREADING_HPP_
#define CURVECLOUD_THREADING_HPP_

namespace curvecloud {

// Caps the number of worker threads used by library operations. Values < 1
// restore the default (all available cores). Results never depend on it.
void set_thread_count(int threads);
int thread_count();

}  // namespace curvecloud

#endif  // CURVECLOUD_THREADING_HPP_
