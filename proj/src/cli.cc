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

#include "pegs/cli.h"

#include <glob.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pegs/blocks.h"
#include "pegs/error.h"
#include "pegs/evaluation.h"
#include "pegs/generator.h"
#include "pegs/grid.h"
#include "pegs/manifest.h"
#include "pegs/parallel.h"
#include "pegs/pmi.h"
#include "pegs/privacy.h"
#include "pegs/sampler.h"

namespace pegs {
namespace {

namespace fs = std::filesystem;

const char* ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kData: return "data";
    case ErrorCode::kPrivacy: return "privacy";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

int ReportError(std::ostream& err, ErrorCode code, const std::string& message) {
  err << nlohmann::json{{"error", ErrorName(code)},
                        {"code", static_cast<int>(code)},
                        {"message", message}}
             .dump()
      << "\n";
  return static_cast<int>(code);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Expands shell-style patterns, sorted per pattern. A pattern without a
// match is an I/O error.
constexpr std::string_view kManifestSuffix = ".manifest.json";

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> ExpandGlobs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == GLOB_NOMATCH) {
      globfree(&g);
      ThrowIo("no files match '" + pattern + "'");
    }
    if (rc != 0) {
      globfree(&g);
      ThrowIo("cannot expand '" + pattern + "'");
    }
    const bool wants_manifests = EndsWith(pattern, kManifestSuffix);
    for (std::size_t i = 0; i < g.gl_pathc; ++i) {
      const std::string path = g.gl_pathv[i];
      if (!wants_manifests && EndsWith(path, kManifestSuffix)) continue;
      out.push_back(path);
    }
    globfree(&g);
    if (out.empty()) ThrowIo("no files match '" + pattern + "'");
  }
  return out;
}

std::string OutputPath(const std::string& pattern, int k, int num) {
  const auto pos = pattern.find("{k}");
  if (pos == std::string::npos) {
    if (num > 1) ThrowUsage("--out needs a '{k}' placeholder when --k > 1");
    return pattern;
  }
  std::string out = pattern;
  out.replace(pos, 3, std::to_string(k));
  return out;
}

CsvOptions MakeCsvOptions(char delimiter, const std::string& missing) {
  CsvOptions options;
  options.delimiter = delimiter;
  options.missing_token = missing;
  return options;
}

RunManifest StartManifest(const std::string& command,
                          const std::vector<std::string>& args) {
  RunManifest m;
  m.command = command;
  m.argv = args;
  m.working_directory = fs::current_path().string();
  m.started_at = UtcTimestamp();
  return m;
}

void FinishManifest(RunManifest& m) {
  m.finished_at = UtcTimestamp();
  WriteManifests(m);
}

FileDigest Digest(const std::string& path) { return {path, Sha256File(path)}; }

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowIo("cannot write " + path);
  out << text;
  if (!out) ThrowIo("failed writing " + path);
}

class Cli {
 public:
  Cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
      : args_(args), out_(out), err_(err) {}

  int Run();

 private:
  void Generate();
  void DisintegrateCmd();
  void PmiFit();
  void SynthesizeCmd();
  void EvaluateCmd();
  void Attack();
  void RuMap();
  void PaperGrid();
  void Replay();

  int Threads() const { return threads_ > 0 ? threads_ : DefaultThreadCount(); }

  const std::vector<std::string>& args_;
  std::ostream& out_;
  std::ostream& err_;
  int threads_ = 0;

  // Shared flag storage.
  std::string input_, schema_, out_path_, blocks_, models_, pool_, trace_,
      trace_table_, manifest_, config_, out_dir_;
  std::string engine_ = "pegs", privacy_ = "dp", prior_ = "uniform";
  std::string missing_token_;
  char delimiter_ = ',';
  int rows_ = 20000, m_ = 2, n_ = 1000, k_ = 1, block_size_ = 1;
  int cv_folds_ = 0, max_iterations_ = 500;
  double epsilon_ = 1.0, l_ = 2.0, lambda_ = 1e-3;
  std::vector<double> lambda_grid_;
  std::uint64_t seed_ = 0;
  std::string schema_out_;
  std::string orig_;
  std::vector<std::string> synth_, reports_, regressions_;
  std::string metrics_ = "marginal,conditional,regression,uniqueness";
  std::string qi_, pairs_, target_, given_, mode_ = "auto";
  std::string algorithm_ = "unknown";
  double label_epsilon_ = 0.0;
};

int Cli::Run() {
  CLI::App app{"Perturbed Gibbs sampler for private synthetic categorical data",
               "pegs"};
  app.require_subcommand(1);
  app.add_option("--threads", threads_, "Worker threads (default PEGS_THREADS)");

  auto* gen = app.add_subcommand("generate", "Write the bundled hospital dataset");
  gen->add_option("--rows", rows_, "Number of records")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed_, "Generator seed");
  gen->add_option("--out", out_path_, "Output CSV")->required();
  gen->add_option("--schema-out", schema_out_, "Output schema JSON")->required();

  auto* dis = app.add_subcommand("disintegrate", "Build the statistical blocks");
  dis->add_option("--input", input_, "Input CSV")->required();
  dis->add_option("--schema", schema_, "Schema JSON")->required();
  dis->add_option("--m", m_, "Number of hashed features");
  dis->add_option("--out", out_path_, "Output .pegsblocks file")->required();
  dis->add_option("--delimiter", delimiter_, "CSV delimiter");
  dis->add_option("--missing-token", missing_token_, "Token read as NA");

  auto* fit = app.add_subcommand("pmi-fit", "Fit the PMI conditional models");
  fit->add_option("--input", input_, "Input CSV")->required();
  fit->add_option("--schema", schema_, "Schema JSON")->required();
  fit->add_option("--lambda", lambda_, "Ridge penalty")->check(CLI::NonNegativeNumber);
  fit->add_option("--cv-folds", cv_folds_, "Choose lambda per feature by k-fold CV");
  fit->add_option("--lambda-grid", lambda_grid_, "Candidate lambdas for CV")
      ->delimiter(',');
  fit->add_option("--max-iterations", max_iterations_, "Optimizer iteration cap");
  fit->add_option("--out", out_path_, "Output model file")->required();
  fit->add_option("--delimiter", delimiter_, "CSV delimiter");
  fit->add_option("--missing-token", missing_token_, "Token read as NA");

  auto* syn = app.add_subcommand("synthesize", "Generate synthetic datasets");
  syn->add_option("--engine", engine_, "pegs or pmi")
      ->check(CLI::IsMember({"pegs", "pmi"}));
  syn->add_option("--blocks", blocks_, "Blocks file (pegs engine)");
  syn->add_option("--models", models_, "Model file (pmi engine)");
  syn->add_option("--privacy", privacy_, "dp, dp-block or ldiv")
      ->check(CLI::IsMember({"dp", "dp-block", "ldiv"}));
  syn->add_option("--epsilon", epsilon_, "Privacy budget");
  syn->add_option("--block-size", block_size_, "PeGS.rs block size");
  syn->add_option("--l", l_, "Entropy l-diversity level");
  syn->add_option("--n", n_, "Records per dataset");
  syn->add_option("--k", k_, "Number of datasets");
  syn->add_option("--seed", seed_, "Random seed");
  syn->add_option("--out", out_path_, "Output CSV pattern, {k} = dataset number")
      ->required();
  syn->add_option("--trace", trace_, "Write per-pass traces as JSON lines");
  syn->add_option("--trace-table", trace_table_, "Write traces as text tables");
  syn->add_option("--pool", pool_, "CSV of seed records (default: uniform)");
  syn->add_option("--prior", prior_, "uniform or proportional")
      ->check(CLI::IsMember({"uniform", "proportional"}));
  syn->add_option("--delimiter", delimiter_, "CSV delimiter");

  auto* ev = app.add_subcommand("evaluate", "Score synthetic data against the original");
  ev->add_option("--orig", orig_, "Original CSV")->required();
  ev->add_option("--synth", synth_, "Synthetic CSV files or patterns")->required();
  ev->add_option("--schema", schema_, "Schema JSON")->required();
  ev->add_option("--metrics", metrics_, "Comma list of metrics");
  ev->add_option("--regression", regressions_, "Model formula (repeatable)");
  ev->add_option("--qi", qi_, "Quasi-identifiers for uniqueness");
  ev->add_option("--pairs", pairs_, "Conditional pairs target|given,...");
  ev->add_option("--algorithm", algorithm_, "Algorithm label for the report");
  ev->add_option("--epsilon", label_epsilon_, "Epsilon label for the report");
  ev->add_option("--seed", seed_, "Seed label for the report");
  ev->add_option("--out", out_path_, "Output report JSON")->required();

  auto* at = app.add_subcommand("attack", "Simulated inference attack");
  at->add_option("--orig", orig_, "Original CSV")->required();
  at->add_option("--synth", synth_, "Synthetic CSV files or patterns")->required();
  at->add_option("--schema", schema_, "Schema JSON")->required();
  at->add_option("--target", target_, "Feature to infer")->required();
  at->add_option("--given", given_, "Comma list of known features")->required();
  at->add_option("--mode", mode_, "auto, categorical or numeric")
      ->check(CLI::IsMember({"auto", "categorical", "numeric"}));
  at->add_option("--algorithm", algorithm_, "Algorithm label for the report");
  at->add_option("--epsilon", label_epsilon_, "Epsilon label for the report");
  at->add_option("--seed", seed_, "Seed label for the report");
  at->add_option("--out", out_path_, "Output report JSON");

  auto* ru = app.add_subcommand("ru-map", "Combine reports into an R-U table");
  ru->add_option("--reports", reports_, "Report files or patterns")->required();
  ru->add_option("--out", out_path_, "Output CSV")->required();

  auto* grid = app.add_subcommand("paper-grid", "Run the experiment grid");
  grid->add_option("--config", config_, "Grid config JSON")->required();
  grid->add_option("--out-dir", out_dir_, "Override the output directory");

  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", manifest_, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args_.rbegin(), args_.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return ReportError(err_, ErrorCode::kUsage, e.what());
  }

  try {
    if (*gen) Generate();
    if (*dis) DisintegrateCmd();
    if (*fit) PmiFit();
    if (*syn) SynthesizeCmd();
    if (*ev) EvaluateCmd();
    if (*at) Attack();
    if (*ru) RuMap();
    if (*grid) PaperGrid();
    if (*replay) Replay();
  } catch (const PegsError& e) {
    return ReportError(err_, e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return ReportError(err_, ErrorCode::kData, "out of memory");
  } catch (const fs::filesystem_error& e) {
    return ReportError(err_, ErrorCode::kIo, e.what());
  } catch (const std::exception& e) {
    return ReportError(err_, ErrorCode::kData, e.what());
  }
  return 0;
}

void Cli::Generate() {
  RunManifest m = StartManifest("generate", args_);
  m.seed = seed_;
  const Dataset data = GenerateHospitalData(rows_, seed_, Threads());
  SaveSchemaFile(data.schema(), schema_out_);
  WriteCsv(data, out_path_);
  m.schema_sha256 = Sha256File(schema_out_);
  m.outputs = {Digest(out_path_), Digest(schema_out_)};
  FinishManifest(m);
  out_ << "wrote " << data.num_rows() << " records to " << out_path_ << "\n";
}

void Cli::DisintegrateCmd() {
  RunManifest m = StartManifest("disintegrate", args_);
  const SchemaPtr schema = LoadSchemaFile(schema_);
  const Dataset data =
      LoadCsv(input_, schema, MakeCsvOptions(delimiter_, missing_token_));
  const BuildingBlocks blocks = Disintegrate(data, m_, Threads());
  SaveBlocks(blocks, out_path_);
  m.schema_sha256 = Sha256File(schema_);
  m.blocks_sha256 = Sha256File(out_path_);
  m.inputs = {Digest(input_), Digest(schema_)};
  m.outputs = {{out_path_, m.blocks_sha256}};
  FinishManifest(m);
  std::size_t keys = 0;
  for (const auto& t : blocks.tables) keys += t.rows.size();
  out_ << "wrote " << blocks.tables.size() << " tables (" << keys
       << " keys) to " << out_path_ << "\n";
}

void Cli::PmiFit() {
  RunManifest m = StartManifest("pmi-fit", args_);
  const SchemaPtr schema = LoadSchemaFile(schema_);
  const Dataset data =
      LoadCsv(input_, schema, MakeCsvOptions(delimiter_, missing_token_));
  GlmFitOptions options;
  options.lambda = lambda_;
  options.max_iterations = max_iterations_;
  PmiModels models;
  if (cv_folds_ > 0) {
    if (lambda_grid_.empty()) lambda_grid_ = {1e-4, 1e-3, 1e-2, 1e-1};
    models.schema = schema;
    models.models.resize(schema->num_features());
    ParallelFor(schema->num_features(), Threads(), [&](int i) {
      GlmFitOptions chosen = options;
      chosen.lambda =
          SelectLambdaByCrossValidation(data, i, lambda_grid_, cv_folds_, options);
      models.models[i] = FitGlmConditional(data, i, chosen);
    });
  } else {
    models = FitPmiModels(data, options, Threads());
  }
  SavePmiModels(models, out_path_);
  int unconverged = 0;
  for (const auto& model : models.models) unconverged += !model.converged;
  if (unconverged > 0) {
    err_ << "warning: " << unconverged
         << " model(s) stopped at the iteration cap before reaching tolerance\n";
  }
  m.schema_sha256 = Sha256File(schema_);
  m.inputs = {Digest(input_), Digest(schema_)};
  m.outputs = {Digest(out_path_)};
  FinishManifest(m);
  out_ << "wrote " << models.models.size() << " models to " << out_path_ << "\n";
}

void Cli::SynthesizeCmd() {
  RunManifest m = StartManifest("synthesize", args_);
  PrivacySpec privacy;
  if (privacy_ == "dp") {
    privacy = PrivacySpec::DpPerSample(epsilon_);
  } else if (privacy_ == "dp-block") {
    privacy = PrivacySpec::DpPerBlock(epsilon_, block_size_);
  } else {
    privacy = PrivacySpec::LDiversity(l_);
  }
  privacy.Check();
  if (n_ < 1) ThrowUsage("--n must be >= 1");
  if (k_ < 1) ThrowUsage("--k must be >= 1");
  if (k_ > 1 && out_path_.find("{k}") == std::string::npos) {
    ThrowUsage("--out needs a '{k}' placeholder when --k > 1");
  }

  SchemaPtr schema;
  std::optional<BuildingBlocks> blocks;
  std::optional<PmiModels> models;
  if (engine_ == "pegs") {
    if (blocks_.empty()) ThrowUsage("the pegs engine needs --blocks");
    blocks = LoadBlocks(blocks_);
    schema = blocks->schema;
    m.blocks_sha256 = Sha256File(blocks_);
    m.inputs.push_back({blocks_, m.blocks_sha256});
  } else {
    if (models_.empty()) ThrowUsage("the pmi engine needs --models");
    models = LoadPmiModels(models_);
    schema = models->schema;
    m.inputs.push_back(Digest(models_));
  }
  m.schema_sha256 = Sha256Hex(SchemaToJson(*schema).dump());
  m.privacy = privacy.ToJson();
  m.seed = seed_;

  std::optional<SeedPool> pool;
  if (pool_.empty()) {
    pool = SeedPool::UniformOverDomain(schema);
  } else {
    pool = SeedPool::FromDataset(LoadCsv(pool_, schema, MakeCsvOptions(delimiter_, "")));
    m.inputs.push_back(Digest(pool_));
  }

  SynthesisOptions options;
  options.num_samples = n_;
  options.num_datasets = k_;
  options.seed = seed_;
  options.keep_traces = !trace_.empty() || !trace_table_.empty();
  options.threads = Threads();
  options.prior = prior_ == "proportional" ? PriorShape::kProportional
                                           : PriorShape::kUniform;
  const SynthesisOutput result =
      engine_ == "pegs" ? Synthesize(*blocks, privacy, *pool, options)
                        : PmiSynthesize(*models, privacy, *pool, options);

  for (int k = 0; k < k_; ++k) {
    const std::string path = OutputPath(out_path_, k + 1, k_);
    WriteCsv(result.datasets[k], path, delimiter_);
    m.outputs.push_back(Digest(path));
  }
  if (!trace_.empty()) {
    std::string text;
    for (int k = 0; k < k_; ++k) {
      for (std::size_t j = 0; j < result.traces[k].size(); ++j) {
        text += TraceToJsonLine(result.traces[k][j], *schema, k + 1,
                                static_cast<int>(j));
        text += "\n";
      }
    }
    WriteText(trace_, text);
    m.outputs.push_back(Digest(trace_));
  }
  if (!trace_table_.empty()) {
    std::string text;
    for (int k = 0; k < k_; ++k) {
      for (std::size_t j = 0; j < result.traces[k].size(); ++j) {
        text += "dataset " + std::to_string(k + 1) + ", pass " +
                std::to_string(j) + "\n";
        text += RenderTraceTable(result.traces[k][j], *schema) + "\n";
      }
    }
    WriteText(trace_table_, text);
    m.outputs.push_back(Digest(trace_table_));
  }
  FinishManifest(m);
  out_ << "wrote " << k_ << " dataset(s) of " << n_ << " records\n";
}

void Cli::EvaluateCmd() {
  RunManifest m = StartManifest("evaluate", args_);
  const SchemaPtr schema = LoadSchemaFile(schema_);
  const Dataset orig = LoadCsv(orig_, schema);
  const auto files = ExpandGlobs(synth_);
  std::vector<Dataset> synthetic;
  for (const auto& f : files) {
    synthetic.push_back(LoadCsv(f, schema));
    m.inputs.push_back(Digest(f));
  }
  m.inputs.insert(m.inputs.begin(), {Digest(orig_), Digest(schema_)});

  GridConfig config;
  config.metrics = SplitList(metrics_);
  config.regressions = regressions_;
  config.quasi_identifiers = SplitList(qi_);
  for (const auto& metric : config.metrics) {
    if (metric != "marginal" && metric != "conditional" &&
        metric != "regression" && metric != "uniqueness") {
      ThrowUsage("unknown metric '" + metric + "'");
    }
  }
  EvalOptions options = MakeEvalOptions(config, *schema);
  for (const auto& pair : SplitList(pairs_)) {
    const auto bar = pair.find('|');
    if (bar == std::string::npos) ThrowUsage("bad pair '" + pair + "', want target|given");
    options.conditional_pairs.emplace_back(schema->RequireFeature(pair.substr(0, bar)),
                                           schema->RequireFeature(pair.substr(bar + 1)));
  }
  EvalReport report = Evaluate(orig, synthetic, options);
  report.algorithm = algorithm_;
  report.epsilon = label_epsilon_;
  report.seed = seed_;
  SaveEvalReport(report, out_path_);
  for (const auto& w : report.warnings) err_ << "warning: " << w << "\n";
  m.schema_sha256 = Sha256File(schema_);
  m.seed = seed_;
  m.outputs = {Digest(out_path_)};
  FinishManifest(m);
  out_ << "wrote " << report.metrics.size() << " metrics to " << out_path_ << "\n";
}

void Cli::Attack() {
  RunManifest m = StartManifest("attack", args_);
  const SchemaPtr schema = LoadSchemaFile(schema_);
  const Dataset orig = LoadCsv(orig_, schema);
  const auto files = ExpandGlobs(synth_);
  m.inputs = {Digest(orig_), Digest(schema_)};
  const int target = schema->RequireFeature(target_);
  std::vector<int> given;
  for (const auto& name : SplitList(given_)) given.push_back(schema->RequireFeature(name));
  bool numeric = mode_ == "numeric";
  if (mode_ == "auto") {
    numeric = schema->feature(target).kind == FeatureKind::kBinnedNumeric;
  }
  double total = 0.0;
  for (const auto& f : files) {
    const Dataset synth = LoadCsv(f, schema);
    m.inputs.push_back(Digest(f));
    total += numeric ? AttackNumeric(orig, synth, target, given)
                     : AttackCategorical(orig, synth, target, given);
  }
  const double value = total / static_cast<double>(files.size());
  const std::string name =
      (numeric ? "attack_mae/" : "attack_misclassification/") + target_;
  out_ << name << " " << value << "\n";
  if (!out_path_.empty()) {
    EvalReport report;
    report.algorithm = algorithm_;
    report.epsilon = label_epsilon_;
    report.seed = seed_;
    report.Add(name, value);
    SaveEvalReport(report, out_path_);
    m.schema_sha256 = Sha256File(schema_);
    m.outputs = {Digest(out_path_)};
    FinishManifest(m);
  }
}

void Cli::RuMap() {
  RunManifest m = StartManifest("ru-map", args_);
  std::vector<EvalReport> reports;
  for (const auto& f : ExpandGlobs(reports_)) {
    reports.push_back(LoadEvalReport(f));
    m.inputs.push_back(Digest(f));
  }
  WriteRuMap(reports, out_path_);
  m.outputs = {Digest(out_path_)};
  FinishManifest(m);
  out_ << "wrote " << reports.size() << " report(s) to " << out_path_ << "\n";
}

void Cli::PaperGrid() {
  GridConfig config = LoadGridConfig(config_);
  if (!out_dir_.empty()) config.out_dir = out_dir_;
  if (threads_ > 0) config.threads = threads_;
  const GridResult result = RunPaperGrid(config, args_);
  out_ << "grid: " << result.reports.size() << " reports, "
       << result.baselines.size() << " baselines (" << result.cells_run
       << " run, " << result.cells_resumed << " resumed); R-U table "
       << result.ru_map_path << "\n";
}

void Cli::Replay() {
  const RunManifest manifest = LoadManifest(manifest_);
  if (manifest.argv.empty()) ThrowData("manifest has no command line");
  if (manifest.argv.front() == "replay") ThrowData("manifest records a replay");
  const fs::path previous = fs::current_path();
  std::error_code ec;
  fs::current_path(manifest.working_directory, ec);
  if (ec) ThrowIo("cannot enter " + manifest.working_directory + ": " + ec.message());
  std::ostringstream sink;
  const int code = RunCli(manifest.argv, sink, err_);
  bool identical = code == 0;
  std::vector<std::string> changed;
  if (code == 0) {
    for (const FileDigest& f : manifest.outputs) {
      if (!fs::exists(f.path) || Sha256File(f.path) != f.sha256) {
        identical = false;
        changed.push_back(f.path);
      }
    }
  }
  fs::current_path(previous, ec);
  if (code != 0) {
    throw PegsError(static_cast<ErrorCode>(code), "replayed command failed");
  }
  if (!identical) {
    std::string list;
    for (const auto& p : changed) list += (list.empty() ? "" : ", ") + p;
    ThrowData("replay produced different outputs: " + list);
  }
  out_ << "replay: " << manifest.outputs.size() << " output(s) identical\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Cli cli(args, out, err);
  return cli.Run();
}

}  // namespace pegs
