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

#include "pegs/grid.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>

#include "pegs/blocks.h"
#include "pegs/error.h"
#include "pegs/generator.h"
#include "pegs/manifest.h"
#include "pegs/parallel.h"
#include "pegs/pmi.h"
#include "pegs/random.h"
#include "pegs/sampler.h"

namespace pegs {
namespace {

namespace fs = std::filesystem;

const std::set<std::string> kAlgorithms{"pegs", "pegs.rs", "pmi"};
const std::set<std::string> kMetrics{"marginal", "conditional", "regression",
                                     "uniqueness"};
const std::set<std::string> kBaselines{"original", "bootstrap",
                                       "bootstrap.independent"};
const std::set<std::string> kConfigKeys{
    "input", "schema", "generate_rows", "generate_seed", "out_dir", "m",
    "algorithms", "block_size", "epsilons", "n", "k", "seeds", "lambda", "pool",
    "metrics", "regressions", "quasi_identifiers", "categorical_attack_target",
    "categorical_attack_given", "numeric_attack_target", "numeric_attack_given",
    "baselines", "write_synthetic", "threads"};

std::string FormatEpsilon(double epsilon) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", epsilon);
  return buf;
}

void CheckAll(const std::vector<std::string>& values,
              const std::set<std::string>& allowed, const char* what) {
  for (const auto& v : values) {
    if (!allowed.contains(v)) ThrowUsage(std::string("unknown ") + what + " '" + v + "'");
  }
}

bool Contains(const std::vector<std::string>& values, std::string_view v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

std::vector<int> FeatureIndices(const Schema& schema,
                                const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& name : names) out.push_back(schema.RequireFeature(name));
  return out;
}

enum class BaselineKind { kOriginal = 0, kBootstrap = 1, kIndependent = 2 };

RngStream ResampleStream(std::uint64_t seed, int index, BaselineKind kind) {
  return RngStream(seed, StreamId(StreamPurpose::kResample,
                                  static_cast<std::uint64_t>(index),
                                  static_cast<std::uint64_t>(kind)));
}

void RequireRows(const Dataset& data, int n) {
  if (data.num_rows() == 0) ThrowData("cannot resample an empty dataset");
  if (n < 1) ThrowUsage("resample size must be >= 1");
}

struct Cell {
  std::string algorithm;  // or baseline name
  bool baseline = false;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string stem;
};

}  // namespace

GridConfig GridConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) ThrowUsage("grid config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) ThrowUsage("unknown grid config key '" + key + "'");
  }
  GridConfig c;
  try {
    c.input = j.value("input", c.input);
    c.schema = j.value("schema", c.schema);
    c.generate_rows = j.value("generate_rows", c.generate_rows);
    c.generate_seed = j.value("generate_seed", c.generate_seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.m = j.value("m", c.m);
    c.algorithms = j.value("algorithms", c.algorithms);
    c.block_size = j.value("block_size", c.block_size);
    c.epsilons = j.value("epsilons", c.epsilons);
    c.n = j.value("n", c.n);
    c.k = j.value("k", c.k);
    c.seeds = j.value("seeds", c.seeds);
    c.lambda = j.value("lambda", c.lambda);
    c.pool = j.value("pool", c.pool);
    c.metrics = j.value("metrics", c.metrics);
    c.regressions = j.value("regressions", c.regressions);
    c.quasi_identifiers = j.value("quasi_identifiers", c.quasi_identifiers);
    c.categorical_attack_target =
        j.value("categorical_attack_target", c.categorical_attack_target);
    c.categorical_attack_given =
        j.value("categorical_attack_given", c.categorical_attack_given);
    c.numeric_attack_target = j.value("numeric_attack_target", c.numeric_attack_target);
    c.numeric_attack_given = j.value("numeric_attack_given", c.numeric_attack_given);
    c.baselines = j.value("baselines", c.baselines);
    c.write_synthetic = j.value("write_synthetic", c.write_synthetic);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    ThrowUsage(std::string("bad grid config: ") + e.what());
  }
  CheckAll(c.algorithms, kAlgorithms, "algorithm");
  CheckAll(c.metrics, kMetrics, "metric");
  CheckAll(c.baselines, kBaselines, "baseline");
  if (c.generate_rows <= 0 && (c.input.empty() || c.schema.empty())) {
    ThrowUsage("grid config needs input and schema, or generate_rows");
  }
  if (c.block_size < 1) ThrowPrivacy("block_size must be >= 1");
  if (c.n < 1 || c.k < 1) ThrowUsage("n and k must be >= 1");
  if (c.seeds.empty()) ThrowUsage("grid config needs at least one seed");
  if (c.algorithms.empty() && c.baselines.empty()) {
    ThrowUsage("grid config has no algorithms or baselines");
  }
  if (!c.algorithms.empty() && c.epsilons.empty()) {
    ThrowUsage("grid config needs at least one epsilon");
  }
  for (double e : c.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) ThrowPrivacy("epsilon must be > 0");
  }
  if (c.pool != "data" && c.pool != "uniform") {
    ThrowUsage("pool must be 'data' or 'uniform'");
  }
  return c;
}

nlohmann::json GridConfigToJson(const GridConfig& c) {
  return {{"input", c.input},
          {"schema", c.schema},
          {"generate_rows", c.generate_rows},
          {"generate_seed", c.generate_seed},
          {"out_dir", c.out_dir},
          {"m", c.m},
          {"algorithms", c.algorithms},
          {"block_size", c.block_size},
          {"epsilons", c.epsilons},
          {"n", c.n},
          {"k", c.k},
          {"seeds", c.seeds},
          {"lambda", c.lambda},
          {"pool", c.pool},
          {"metrics", c.metrics},
          {"regressions", c.regressions},
          {"quasi_identifiers", c.quasi_identifiers},
          {"categorical_attack_target", c.categorical_attack_target},
          {"categorical_attack_given", c.categorical_attack_given},
          {"numeric_attack_target", c.numeric_attack_target},
          {"numeric_attack_given", c.numeric_attack_given},
          {"baselines", c.baselines},
          {"write_synthetic", c.write_synthetic},
          {"threads", c.threads}};
}

GridConfig LoadGridConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open grid config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    ThrowUsage("grid config " + path + " is not valid JSON: " + e.what());
  }
  return GridConfigFromJson(j);
}

std::vector<std::string> DefaultRegressions(const Schema& schema) {
  for (const char* name : {"charge", "age.yrs", "sev", "cat", "los"}) {
    if (!schema.FeatureIndex(name)) return {};
  }
  return {"logistic:charge>25000~num(age.yrs)+sev+cat+num(los)",
          "linear:charge~num(age.yrs)+sev+cat+num(los)"};
}

std::vector<std::string> DefaultQuasiIdentifiers(const Schema& schema) {
  std::vector<std::string> out;
  for (const char* name : {"age.yrs", "sex", "patzip"}) {
    if (schema.FeatureIndex(name)) out.push_back(name);
  }
  return out;
}

EvalOptions MakeEvalOptions(const GridConfig& config, const Schema& schema) {
  EvalOptions options;
  options.marginal = Contains(config.metrics, "marginal");
  options.conditional = Contains(config.metrics, "conditional");
  options.uniqueness = Contains(config.metrics, "uniqueness");
  if (Contains(config.metrics, "regression")) {
    const std::vector<std::string> formulas = config.regressions.empty()
                                                  ? DefaultRegressions(schema)
                                                  : config.regressions;
    if (formulas.empty()) {
      ThrowUsage("the regression metric needs at least one formula");
    }
    for (const auto& f : formulas) {
      const RegressionSpec spec = RegressionSpec::Parse(f);
      BuildDesignMatrix(Dataset(std::make_shared<const Schema>(schema)), spec);
      options.regressions.push_back(spec);
    }
  }
  if (options.uniqueness) {
    const std::vector<std::string> names = config.quasi_identifiers.empty()
                                               ? DefaultQuasiIdentifiers(schema)
                                               : config.quasi_identifiers;
    if (names.empty()) {
      ThrowUsage("the uniqueness metric needs quasi-identifiers");
    }
    options.quasi_identifiers = FeatureIndices(schema, names);
  }
  if (!config.categorical_attack_target.empty()) {
    options.categorical_attack_target =
        schema.RequireFeature(config.categorical_attack_target);
    options.categorical_attack_given =
        FeatureIndices(schema, config.categorical_attack_given);
  }
  if (!config.numeric_attack_target.empty()) {
    options.numeric_attack_target =
        schema.RequireFeature(config.numeric_attack_target);
    options.numeric_attack_given =
        FeatureIndices(schema, config.numeric_attack_given);
  }
  return options;
}

Dataset SubsampleRows(const Dataset& data, int n, std::uint64_t seed, int index) {
  RequireRows(data, n);
  std::vector<int> rows(data.num_rows());
  std::iota(rows.begin(), rows.end(), 0);
  const int take = std::min(n, data.num_rows());
  RngStream rng = ResampleStream(seed, index, BaselineKind::kOriginal);
  for (int i = 0; i < take; ++i) {
    const auto j = i + static_cast<int>(rng.UniformInt(rows.size() - i));
    std::swap(rows[i], rows[j]);
  }
  Dataset out(data.schema_ptr());
  out.Reserve(take);
  for (int i = 0; i < take; ++i) out.AppendRow(data.row(rows[i]));
  return out;
}

Dataset BootstrapRows(const Dataset& data, int n, std::uint64_t seed, int index) {
  RequireRows(data, n);
  RngStream rng = ResampleStream(seed, index, BaselineKind::kBootstrap);
  Dataset out(data.schema_ptr());
  out.Reserve(n);
  for (int i = 0; i < n; ++i) {
    out.AppendRow(data.row(static_cast<int>(rng.UniformInt(data.num_rows()))));
  }
  return out;
}

Dataset BootstrapIndependent(const Dataset& data, int n, std::uint64_t seed,
                             int index) {
  RequireRows(data, n);
  RngStream rng = ResampleStream(seed, index, BaselineKind::kIndependent);
  const int m = data.num_features();
  Dataset out(data.schema_ptr());
  out.Reserve(n);
  Record rec(m);
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < m; ++f) {
      rec[f] = data.at(static_cast<int>(rng.UniformInt(data.num_rows())), f);
    }
    out.AppendRow(rec);
  }
  return out;
}

GridResult RunPaperGrid(const GridConfig& config,
                        const std::vector<std::string>& argv) {
  const int threads = config.threads > 0 ? config.threads : DefaultThreadCount();
  const fs::path out_dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) ThrowIo("cannot create " + out_dir.string() + ": " + ec.message());
  const std::string cwd = fs::current_path().string();
  const std::string started = UtcTimestamp();

  // Ground truth.
  std::optional<Dataset> loaded;
  if (config.generate_rows > 0) {
    loaded = GenerateHospitalData(config.generate_rows, config.generate_seed, threads);
    SaveSchemaFile(loaded->schema(), (out_dir / "schema.json").string());
    WriteCsv(*loaded, (out_dir / "data.csv").string());
  } else {
    loaded = LoadCsv(config.input, LoadSchemaFile(config.schema));
  }
  const Dataset& data = *loaded;
  const Schema& schema = data.schema();
  const std::string data_sha = Sha256Hex(FormatCsv(data));
  const std::string schema_sha = Sha256Hex(SchemaToJson(schema).dump());
  const EvalOptions eval_options = MakeEvalOptions(config, schema);

  RunManifest base;
  base.command = "paper-grid";
  base.argv = argv;
  base.working_directory = cwd;
  base.schema_sha256 = schema_sha;
  base.started_at = started;

  // Shared artifacts.
  const std::string blocks_path = (out_dir / "blocks.pegsblocks").string();
  const BuildingBlocks blocks = Disintegrate(data, config.m, threads);
  SaveBlocks(blocks, blocks_path);
  const std::string blocks_sha = Sha256File(blocks_path);
  base.blocks_sha256 = blocks_sha;
  {
    RunManifest m = base;
    m.inputs = {{"data", data_sha}};
    m.outputs = {{blocks_path, blocks_sha}};
    m.finished_at = UtcTimestamp();
    WriteManifests(m);
  }

  std::optional<PmiModels> models;
  if (Contains(config.algorithms, "pmi")) {
    const std::string models_path = (out_dir / "models.pmi").string();
    const std::vector<FileDigest> inputs{
        {"data", data_sha},
        {"lambda", Sha256Hex(nlohmann::json(config.lambda).dump())}};
    const std::string manifest_path = ManifestPathFor(models_path);
    bool reuse = false;
    if (fs::exists(manifest_path)) {
      const RunManifest previous = LoadManifest(manifest_path);
      reuse = OutputsMatch(previous) && previous.inputs.size() == inputs.size() &&
              std::equal(inputs.begin(), inputs.end(), previous.inputs.begin(),
                         [](const FileDigest& a, const FileDigest& b) {
                           return a.path == b.path && a.sha256 == b.sha256;
                         });
    }
    if (reuse) {
      models = LoadPmiModels(models_path);
    } else {
      GlmFitOptions fit;
      fit.lambda = config.lambda;
      models = FitPmiModels(data, fit, threads);
      SavePmiModels(*models, models_path);
      RunManifest m = base;
      m.inputs = inputs;
      m.outputs = {{models_path, Sha256File(models_path)}};
      m.finished_at = UtcTimestamp();
      WriteManifests(m);
    }
  }

  const SeedPool pool = config.pool == "data"
                            ? SeedPool::FromDataset(data)
                            : SeedPool::UniformOverDomain(data.schema_ptr());

  std::vector<Cell> cells;
  for (const auto& algorithm : config.algorithms) {
    for (double epsilon : config.epsilons) {
      for (std::uint64_t seed : config.seeds) {
        cells.push_back({algorithm, false, epsilon, seed,
                         "report_" + algorithm + "_eps" + FormatEpsilon(epsilon) +
                             "_seed" + std::to_string(seed)});
      }
    }
  }
  const std::size_t num_algorithm_cells = cells.size();
  for (const auto& baseline : config.baselines) {
    for (std::uint64_t seed : config.seeds) {
      cells.push_back({baseline, true, 0.0, seed,
                       "baseline_" + baseline + "_seed" + std::to_string(seed)});
    }
  }

  // Settings that change a cell's result, excluding the grid axes.
  nlohmann::json shared = GridConfigToJson(config);
  for (const char* key : {"algorithms", "epsilons", "seeds", "baselines", "out_dir",
                          "threads", "input", "schema", "write_synthetic"}) {
    shared.erase(key);
  }

  std::vector<EvalReport> reports(cells.size());
  std::atomic<int> resumed{0};
  ParallelFor(static_cast<int>(cells.size()), threads, [&](int c) {
    const Cell& cell = cells[c];
    const std::string report_path = (out_dir / (cell.stem + ".json")).string();
    nlohmann::json fingerprint = shared;
    fingerprint["algorithm"] = cell.algorithm;
    fingerprint["epsilon"] = cell.epsilon;
    fingerprint["seed"] = cell.seed;
    const std::vector<FileDigest> inputs{
        {"data", data_sha},
        {"cell", Sha256Hex(fingerprint.dump())},
        {"blocks", cell.algorithm == "pegs" || cell.algorithm == "pegs.rs"
                       ? blocks_sha
                       : std::string()}};
    const std::string manifest_path = ManifestPathFor(report_path);
    if (fs::exists(manifest_path)) {
      const RunManifest previous = LoadManifest(manifest_path);
      const bool same_inputs =
          previous.inputs.size() == inputs.size() &&
          std::equal(inputs.begin(), inputs.end(), previous.inputs.begin(),
                     [](const FileDigest& a, const FileDigest& b) {
                       return a.path == b.path && a.sha256 == b.sha256;
                     });
      if (same_inputs && OutputsMatch(previous)) {
        reports[c] = LoadEvalReport(report_path);
        ++resumed;
        return;
      }
    }

    SynthesisOptions options;
    options.num_samples = config.n;
    options.num_datasets = config.k;
    options.seed = cell.seed;
    options.threads = 1;
    std::vector<Dataset> synthetic;
    nlohmann::json privacy;
    if (cell.baseline) {
      for (int k = 0; k < config.k; ++k) {
        if (cell.algorithm == "original") {
          synthetic.push_back(SubsampleRows(data, config.n, cell.seed, k));
        } else if (cell.algorithm == "bootstrap") {
          synthetic.push_back(BootstrapRows(data, config.n, cell.seed, k));
        } else {
          synthetic.push_back(BootstrapIndependent(data, config.n, cell.seed, k));
        }
      }
    } else if (cell.algorithm == "pmi") {
      const PrivacySpec spec = PrivacySpec::DpPerSample(cell.epsilon);
      privacy = spec.ToJson();
      synthetic = PmiSynthesize(*models, spec, pool, options).datasets;
    } else {
      const PrivacySpec spec =
          cell.algorithm == "pegs"
              ? PrivacySpec::DpPerSample(cell.epsilon)
              : PrivacySpec::DpPerBlock(cell.epsilon * config.block_size,
                                        config.block_size);
      privacy = spec.ToJson();
      synthetic = Synthesize(blocks, spec, pool, options).datasets;
    }

    EvalReport report = Evaluate(data, synthetic, eval_options);
    report.algorithm = cell.algorithm;
    report.epsilon = cell.epsilon;
    report.seed = cell.seed;
    SaveEvalReport(report, report_path);

    RunManifest m = base;
    m.privacy = privacy;
    m.seed = cell.seed;
    m.inputs = inputs;
    m.outputs = {{report_path, Sha256File(report_path)}};
    if (config.write_synthetic) {
      for (std::size_t k = 0; k < synthetic.size(); ++k) {
        const std::string path =
            (out_dir / (cell.stem + "_synth_" + std::to_string(k + 1) + ".csv"))
                .string();
        WriteCsv(synthetic[k], path);
        m.outputs.push_back({path, Sha256File(path)});
      }
    }
    m.finished_at = UtcTimestamp();
    WriteManifests(m);
    reports[c] = std::move(report);
  });

  GridResult result;
  result.reports.assign(reports.begin(), reports.begin() + num_algorithm_cells);
  result.baselines.assign(reports.begin() + num_algorithm_cells, reports.end());
  result.cells_resumed = resumed.load();
  result.cells_run = static_cast<int>(cells.size()) - result.cells_resumed;
  result.ru_map_path = (out_dir / "ru.csv").string();
  WriteRuMap(reports, result.ru_map_path);
  RunManifest m = base;
  m.inputs = {{"data", data_sha}};
  m.outputs = {{result.ru_map_path, Sha256File(result.ru_map_path)}};
  m.finished_at = UtcTimestamp();
  WriteManifests(m);
  return result;
}

}  // namespace pegs
