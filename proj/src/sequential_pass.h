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

#ifndef PEGS_SEQUENTIAL_PASS_H_
#define PEGS_SEQUENTIAL_PASS_H_

#include <vector>

#include "pegs/random.h"
#include "pegs/sampler.h"

namespace pegs::internal {

// Resamples every feature of `record` in schema order. `fill(i, record, p)`
// writes the conditional for feature i into p (already sized to C_i) and
// returns the hash key it used (0 when there is none).
template <typename FillFn>
void SequentialPass(const Schema& schema, Record& record, RngStream& rng,
                    FillFn&& fill, SynthesisTrace* trace) {
  const int m = schema.num_features();
  if (trace) {
    trace->seed = record;
    trace->steps.clear();
    trace->steps.reserve(m);
  }
  std::vector<double> p;
  for (int i = 0; i < m; ++i) {
    p.assign(schema.num_categories(i), 0.0);
    const std::uint64_t key = fill(i, record, p);
    const Category before = record[i];
    record[i] = static_cast<Category>(rng.Categorical(p));
    if (trace) trace->steps.push_back({i, key, before, record[i]});
  }
}

}  // namespace pegs::internal

#endif  // PEGS_SEQUENTIAL_PASS_H_
