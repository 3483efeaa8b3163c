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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pegs/blocks.h"
#include "pegs/error.h"
#include "pegs/evaluation.h"
#include "pegs/generator.h"
#include "pegs/hashing.h"
#include "pegs/pmi.h"
#include "pegs/privacy.h"
#include "pegs/sampler.h"
#include "pegs/schema.h"

namespace py = pybind11;

namespace pegs::python {
namespace {

using IntArray = py::array_t<Category, py::array::c_style | py::array::forcecast>;

Dataset DatasetFromArray(SchemaPtr schema, const IntArray& cells) {
  if (cells.ndim() != 2) throw py::value_error("expected a 2-d array");
  if (cells.shape(1) != schema->num_features()) {
    throw py::value_error("array width does not match the schema");
  }
  std::vector<Category> values(cells.data(), cells.data() + cells.size());
  Dataset out(std::move(schema), std::move(values));
  if (!Validate(out).empty()) throw PegsError(ErrorCode::kData, "cell out of range");
  return out;
}

IntArray DatasetToArray(const Dataset& d) {
  IntArray out({static_cast<py::ssize_t>(d.num_rows()),
                static_cast<py::ssize_t>(d.num_features())});
  std::copy(d.cells().begin(), d.cells().end(), out.mutable_data());
  return out;
}

PrivacySpec MakePrivacy(const std::string& criterion, double epsilon,
                        int block_size, double l) {
  if (criterion == "dp") return PrivacySpec::DpPerSample(epsilon);
  if (criterion == "dp-block") return PrivacySpec::DpPerBlock(epsilon, block_size);
  if (criterion == "ldiv") return PrivacySpec::LDiversity(l);
  throw PegsError(ErrorCode::kUsage, "unknown privacy criterion '" + criterion + "'");
}

SeedPool MakePool(const SchemaPtr& schema, const std::optional<Dataset>& pool) {
  return pool ? SeedPool::FromDataset(*pool) : SeedPool::UniformOverDomain(schema);
}

SynthesisOptions MakeOptions(int n, int k, std::uint64_t seed, int threads) {
  SynthesisOptions options;
  options.num_samples = n;
  options.num_datasets = k;
  options.seed = seed;
  options.threads = threads;
  return options;
}

std::vector<int> Indices(const Schema& schema, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(schema.RequireFeature(n));
  return out;
}

}  // namespace

void DefineModule(py::module_& m) {
  static py::handle error_type =
      py::exception<PegsError>(m, "PegsError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PegsError& e) {
      py::object instance =
          py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("code") = static_cast<int>(e.code());
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<Schema, std::shared_ptr<Schema>>(m, "Schema")
      .def_static("from_json",
                  [](const std::string& text) {
                    return std::const_pointer_cast<Schema>(
                        SchemaFromJson(nlohmann::json::parse(text)));
                  })
      .def_static("load",
                  [](const std::string& path) {
                    return std::const_pointer_cast<Schema>(LoadSchemaFile(path));
                  })
      .def("to_json", [](const Schema& s) { return SchemaToJson(s).dump(); })
      .def("save", [](const Schema& s, const std::string& path) { SaveSchemaFile(s, path); })
      .def_property_readonly("names",
                             [](const Schema& s) {
                               std::vector<std::string> out;
                               for (const auto& f : s.features()) out.push_back(f.name);
                               return out;
                             })
      .def_property_readonly("cardinalities", &Schema::Cardinalities)
      .def("categories",
           [](const Schema& s, const std::string& name) {
             return s.feature(s.RequireFeature(name)).categories;
           })
      .def("__len__", &Schema::num_features);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](std::shared_ptr<Schema> schema, const IntArray& cells) {
             return DatasetFromArray(std::move(schema), cells);
           }),
           py::arg("schema"), py::arg("cells"))
      .def_static("load_csv",
                  [](const std::string& path, std::shared_ptr<Schema> schema) {
                    return LoadCsv(path, std::move(schema));
                  })
      .def("to_csv", [](const Dataset& d, const std::string& path) { WriteCsv(d, path); })
      .def("to_numpy", &DatasetToArray)
      .def_property_readonly("schema",
                             [](const Dataset& d) {
                               return std::const_pointer_cast<Schema>(d.schema_ptr());
                             })
      .def_property_readonly("num_rows", &Dataset::num_rows)
      .def("__len__", &Dataset::num_rows)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  py::class_<BuildingBlocks>(m, "Blocks")
      .def_static("load", &LoadBlocks)
      .def("save", [](const BuildingBlocks& b, const std::string& path) { SaveBlocks(b, path); })
      .def_property_readonly("num_rows", [](const BuildingBlocks& b) { return b.num_rows; })
      .def_property_readonly("schema",
                             [](const BuildingBlocks& b) {
                               return std::const_pointer_cast<Schema>(b.schema);
                             })
      .def("key_space",
           [](const BuildingBlocks& b, int i) { return b.tables.at(i).hash.key_space; })
      .def("num_keys",
           [](const BuildingBlocks& b, int i) { return b.tables.at(i).rows.size(); })
      .def("hash_record",
           [](const BuildingBlocks& b, int i, std::vector<Category> record) {
             return HashRecord(record, b.tables.at(i).hash);
           })
      .def("conditional",
           [](const BuildingBlocks& b, int i, std::uint64_t key, double alpha) {
             return Conditional(b, i, key, alpha);
           },
           py::arg("feature"), py::arg("key"), py::arg("alpha"));

  py::class_<PmiModels>(m, "PmiModels")
      .def_static("load", &LoadPmiModels)
      .def("save", [](const PmiModels& p, const std::string& path) { SavePmiModels(p, path); })
      .def("probabilities",
           [](const PmiModels& p, int i, std::vector<Category> record, double alpha) {
             return PmiProbability(p.models.at(i), record, alpha);
           },
           py::arg("feature"), py::arg("record"), py::arg("alpha") = 0.0);

  m.def("hospital_schema",
        [] { return std::const_pointer_cast<Schema>(HospitalSchema()); });
  m.def("generate_hospital_data", &GenerateHospitalData, py::arg("rows"),
        py::arg("seed") = 1, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def("mutual_information", &MutualInformation, py::arg("dataset"),
        py::arg("i"), py::arg("j"));
  m.def("disintegrate", &Disintegrate, py::arg("dataset"), py::arg("m") = 2,
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def("alpha_for_epsilon", &AlphaForEpsilon, py::arg("epsilon"),
        py::arg("num_features"));
  m.def("alpha_for_block", &AlphaForBlock, py::arg("epsilon"),
        py::arg("num_features"), py::arg("block_size"));
  m.def("alpha_for_ldiversity",
        [](std::vector<std::int64_t> counts, double l) {
          CountRow row;
          row.counts = std::move(counts);
          for (auto c : row.counts) row.total += c;
          return AlphaForLDiversity(row, l, static_cast<int>(row.counts.size()));
        },
        py::arg("counts"), py::arg("l"));

  m.def("synthesize",
        [](const BuildingBlocks& blocks, const std::string& privacy,
           double epsilon, int block_size, double l, int n, int k,
           std::uint64_t seed, std::optional<Dataset> pool, int threads) {
          const PrivacySpec spec = MakePrivacy(privacy, epsilon, block_size, l);
          py::gil_scoped_release release;
          return Synthesize(blocks, spec, MakePool(blocks.schema, pool),
                            MakeOptions(n, k, seed, threads))
              .datasets;
        },
        py::arg("blocks"), py::arg("privacy") = "dp", py::arg("epsilon") = 1.0,
        py::arg("block_size") = 1, py::arg("l") = 2.0, py::arg("n") = 1000,
        py::arg("k") = 1, py::arg("seed") = 0, py::arg("pool") = py::none(),
        py::arg("threads") = 1);

  m.def("fit_pmi",
        [](const Dataset& data, double lambda, int threads) {
          GlmFitOptions options;
          options.lambda = lambda;
          py::gil_scoped_release release;
          return FitPmiModels(data, options, threads);
        },
        py::arg("dataset"), py::arg("lam") = 1e-3, py::arg("threads") = 1);
  m.def("pmi_synthesize",
        [](const PmiModels& models, double epsilon, int n, int k,
           std::uint64_t seed, std::optional<Dataset> pool, int threads) {
          const PrivacySpec spec = PrivacySpec::DpPerSample(epsilon);
          py::gil_scoped_release release;
          return PmiSynthesize(models, spec, MakePool(models.schema, pool),
                               MakeOptions(n, k, seed, threads))
              .datasets;
        },
        py::arg("models"), py::arg("epsilon") = 1.0, py::arg("n") = 1000,
        py::arg("k") = 1, py::arg("seed") = 0, py::arg("pool") = py::none(),
        py::arg("threads") = 1);
  m.def("perturb_probabilities",
        [](std::vector<double> g, double alpha) { return PerturbProbabilities(g, alpha); },
        py::arg("g"), py::arg("alpha"));

  m.def("marginal_distance", &MarginalDistance, py::arg("orig"),
        py::arg("synth"), py::arg("feature"));
  m.def("conditional_distance", &ConditionalDistance, py::arg("orig"),
        py::arg("synth"), py::arg("target"), py::arg("given"));
  m.def("fit_regression",
        [](const Dataset& data, const std::string& formula) {
          const RegressionFit fit = FitRegression(data, RegressionSpec::Parse(formula));
          py::dict out;
          out["names"] = fit.names;
          out["coefficients"] = std::vector<double>(
              fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
          out["variances"] = std::vector<double>(
              fit.variances.data(), fit.variances.data() + fit.variances.size());
          out["converged"] = fit.converged;
          out["warnings"] = fit.warnings;
          return out;
        },
        py::arg("dataset"), py::arg("formula"));
  m.def("regression_distance",
        [](std::vector<double> synth, std::vector<double> orig) {
          return RegressionDistance(synth, orig).value;
        },
        py::arg("synth"), py::arg("orig"));
  m.def("combine_estimates",
        [](std::vector<double> q, std::vector<double> v) {
          const CombinedEstimate c = CombineEstimates(q, v);
          return py::make_tuple(c.q_bar, c.t_s);
        },
        py::arg("q"), py::arg("v"));
  m.def("population_uniqueness",
        [](const Dataset& d, const std::vector<std::string>& qi) {
          const Uniqueness u = PopulationUniqueness(d, Indices(d.schema(), qi));
          return py::make_tuple(u.count, u.fraction);
        },
        py::arg("dataset"), py::arg("quasi_identifiers"));
  m.def("attack_categorical",
        [](const Dataset& orig, const Dataset& synth, const std::string& target,
           const std::vector<std::string>& given) {
          return AttackCategorical(orig, synth, orig.schema().RequireFeature(target),
                                   Indices(orig.schema(), given));
        },
        py::arg("orig"), py::arg("synth"), py::arg("target"), py::arg("given"));
  m.def("attack_numeric",
        [](const Dataset& orig, const Dataset& synth, const std::string& target,
           const std::vector<std::string>& given) {
          return AttackNumeric(orig, synth, orig.schema().RequireFeature(target),
                               Indices(orig.schema(), given));
        },
        py::arg("orig"), py::arg("synth"), py::arg("target"), py::arg("given"));
}

}  // namespace pegs::python

PYBIND11_MODULE(_pegs, m) {
  m.doc() = "Perturbed Gibbs sampler bindings";
  pegs::python::DefineModule(m);
}
