// Copyright 2026 The DyNODE Authors
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

// Minimal fan-out helpers for independent work items (seeds, grid cells).

#ifndef DYNODE_COMMON_PARALLEL_H_
#define DYNODE_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace dynode {

// Worker-thread cap: DYNODE_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t ThreadBudget();

// Runs fn(0..n-1) on up to `threads` workers. Items are claimed in index
// order; results must be written to per-index slots so output never depends
// on scheduling. The first exception (lowest index) is rethrown after all
// workers finish.
void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace dynode

#endif  // DYNODE_COMMON_PARALLEL_H_
