// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEGS_PARALLEL_H_
#define PEGS_PARALLEL_H_

#include <functional>

namespace pegs {

// Worker count from PEGS_THREADS, else the hardware concurrency (at least 1).
int DefaultThreadCount();

// Runs fn(0..n-1) on up to `threads` workers. The first exception thrown by
// any task is rethrown on the calling thread after all workers stop.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

}  // namespace pegs

#endif  // PEGS_PARALLEL_H_
