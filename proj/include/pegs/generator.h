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

#ifndef PEGS_GENERATOR_H_
#define PEGS_GENERATOR_H_

#include <cstdint>

#include "pegs/schema.h"

namespace pegs {

// Thirteen-feature hospital discharge schema: typ, age.yrs, sex, ethncty,
// race, patzip, los, disp, pay, charge, MDC, sev, cat. Age, length of stay
// and charge are binned numerics with a leading "NA" bin for age and los.
SchemaPtr HospitalSchema();

// Draws `num_rows` discharge records from a fixed structured model
// (zip -> race -> ethnicity; care type -> age -> sex -> diagnosis ->
// surgical flag -> severity -> stay -> charge, payer and disposition).
// Numeric quantities are generated raw and binned. Row r depends only on
// (seed, r).
Dataset GenerateHospitalData(int num_rows, std::uint64_t seed, int threads = 1);

}  // namespace pegs

#endif  // PEGS_GENERATOR_H_
