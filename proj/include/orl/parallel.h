// Copyright 2026 The ORL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ORL_PARALLEL_H_
#define ORL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace orl {

// Number of workers to use when the caller asks for 0 ("auto").
int default_workers();

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; callers write results into per-index slots so the outcome is
// independent of scheduling. The first exception thrown by any task is
// rethrown after all threads have joined.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

}  // namespace orl

#endif  // ORL_PARALLEL_H_
