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

#ifndef PEGS_GRID_H_
#define PEGS_GRID_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pegs/evaluation.h"

namespace pegs {

// Experiment grid over algorithms x epsilons x seeds. JSON keys match the
// field names; every field is optional.
struct GridConfig {
  // Either a CSV with its schema, or the bundled generator when
  // generate_rows > 0.
  std::string input;
  std::string schema;
  int generate_rows = 0;
  std::uint64_t generate_seed = 1;

  std::string out_dir = "grid";
  int m = 2;
  // Any of "pegs", "pegs.rs", "pmi".
  std::vector<std::string> algorithms{"pegs", "pegs.rs", "pmi"};
  // Epsilon is per synthetic record; a PeGS.rs block spends epsilon * B.
  int block_size = 10;
  std::vector<double> epsilons{0.1, 0.5, 1, 5, 10, 50, 100};
  int n = 1000;
  int k = 3;
  std::vector<std::uint64_t> seeds{1};
  double lambda = 1e-3;
  // "data" seeds synthesis from original rows; "uniform" from the domain.
  std::string pool = "data";

  std::vector<std::string> metrics{"marginal", "conditional", "regression",
                                   "uniqueness"};
  std::vector<std::string> regressions;
  std::vector<std::string> quasi_identifiers;
  std::string categorical_attack_target;
  std::vector<std::string> categorical_attack_given;
  std::string numeric_attack_target;
  std::vector<std::string> numeric_attack_given;
  // Any of "original" (subsamples of n rows), "bootstrap" (rows drawn with
  // replacement), "bootstrap.independent" (each feature resampled alone).
  std::vector<std::string> baselines;

  bool write_synthetic = false;
  int threads = 0;  // 0 = DefaultThreadCount()
};

GridConfig GridConfigFromJson(const nlohmann::json& j);
nlohmann::json GridConfigToJson(const GridConfig& config);
GridConfig LoadGridConfig(const std::string& path);

struct GridResult {
  std::vector<EvalReport> reports;    // algorithm cells, in grid order
  std::vector<EvalReport> baselines;  // per baseline and seed
  int cells_run = 0;
  int cells_resumed = 0;
  std::string ru_map_path;
};

// Runs every cell, writing report_<algorithm>_eps<epsilon>_seed<seed>.json
// with a manifest, baseline_<name>_seed<seed>.json, and ru.csv into out_dir.
// A cell whose manifest still matches its report and inputs is loaded
// instead of recomputed. `argv` is recorded in the manifests.
GridResult RunPaperGrid(const GridConfig& config,
                        const std::vector<std::string>& argv = {});

// Resolves the metric and attack settings of a grid against a schema.
// Fallbacks used when a config or command line names no regression formulas
// or quasi-identifiers: the hospital models and (age.yrs, sex, patzip) when
// the schema has those features, empty otherwise.
std::vector<std::string> DefaultRegressions(const Schema& schema);
std::vector<std::string> DefaultQuasiIdentifiers(const Schema& schema);

// Empty regression and quasi-identifier lists take the defaults above.
EvalOptions MakeEvalOptions(const GridConfig& config, const Schema& schema);

// Synthetic comparison datasets built by resampling the original.
Dataset SubsampleRows(const Dataset& data, int n, std::uint64_t seed, int index);
Dataset BootstrapRows(const Dataset& data, int n, std::uint64_t seed, int index);
Dataset BootstrapIndependent(const Dataset& data, int n, std::uint64_t seed,
                             int index);

}  // namespace pegs

#endif  // PEGS_GRID_H_
