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

#include "pegs/schema.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pegs/error.h"

namespace pegs {

std::vector<double> DefaultRepresentatives(const std::vector<double>& edges) {
  std::vector<double> reps;
  if (edges.empty()) return {0.0};
  reps.reserve(edges.size() + 1);
  const double first_width = edges.size() >= 2 ? edges[1] - edges[0] : 1.0;
  reps.push_back(edges[0] - first_width);
  for (double e : edges) reps.push_back(e);
  return reps;
}

Schema::Schema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  if (features_.size() < 2) {
    ThrowData("schema needs at least two features, got " +
              std::to_string(features_.size()));
  }
  label_index_.resize(features_.size());
  for (int i = 0; i < num_features(); ++i) {
    FeatureSpec& f = features_[i];
    if (f.name.empty()) ThrowData("feature " + std::to_string(i) + " has no name");
    if (!name_index_.emplace(f.name, i).second) {
      ThrowData("duplicate feature name '" + f.name + "'");
    }
    if (f.categories.empty()) {
      ThrowData("feature '" + f.name + "' has no categories");
    }
    for (Category c = 0; c < f.num_categories(); ++c) {
      if (!label_index_[i].emplace(f.categories[c], c).second) {
        ThrowData("feature '" + f.name + "' repeats label '" +
                  f.categories[c] + "'");
      }
    }
    if (f.kind == FeatureKind::kBinnedNumeric) {
      if (f.bin_edges.size() + 1 != f.categories.size()) {
        ThrowData("feature '" + f.name + "' has " +
                  std::to_string(f.bin_edges.size()) + " bin edges but " +
                  std::to_string(f.categories.size()) + " categories");
      }
      for (std::size_t k = 0; k < f.bin_edges.size(); ++k) {
        if (!std::isfinite(f.bin_edges[k]) ||
            (k > 0 && !(f.bin_edges[k] > f.bin_edges[k - 1]))) {
          ThrowData("feature '" + f.name +
                    "' bin edges must be finite and strictly ascending");
        }
      }
      if (f.numeric_representatives.empty()) {
        f.numeric_representatives = DefaultRepresentatives(f.bin_edges);
      }
    } else if (!f.bin_edges.empty()) {
      ThrowData("categorical feature '" + f.name + "' declares bin edges");
    }
    if (!f.numeric_representatives.empty() &&
        f.numeric_representatives.size() != f.categories.size()) {
      ThrowData("feature '" + f.name + "' needs one numeric representative "
                "per category");
    }
    max_categories_ = std::max(max_categories_, f.num_categories());
  }
}

std::vector<int> Schema::Cardinalities() const {
  std::vector<int> out(features_.size());
  for (int i = 0; i < num_features(); ++i) out[i] = num_categories(i);
  return out;
}

std::optional<int> Schema::FeatureIndex(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Category> Schema::CategoryIndex(int feature,
                                              std::string_view label) const {
  const auto& index = label_index_[feature];
  auto it = index.find(std::string(label));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<Category> Schema::MissingCategory(int feature) const {
  return CategoryIndex(feature, kMissingLabel);
}

int Schema::RequireFeature(std::string_view name) const {
  auto index = FeatureIndex(name);
  if (!index) ThrowUsage("unknown feature '" + std::string(name) + "'");
  return *index;
}

nlohmann::json SchemaToJson(const Schema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureSpec& f : schema.features()) {
    nlohmann::json entry;
    entry["name"] = f.name;
    entry["kind"] = f.kind == FeatureKind::kBinnedNumeric ? "binned-numeric"
                                                          : "categorical";
    entry["categories"] = f.categories;
    if (!f.bin_edges.empty()) entry["bin_edges"] = f.bin_edges;
    if (!f.numeric_representatives.empty()) {
      entry["numeric_representatives"] = f.numeric_representatives;
    }
    features.push_back(std::move(entry));
  }
  return nlohmann::json{{"features", std::move(features)}};
}

SchemaPtr SchemaFromJson(const nlohmann::json& document) {
  if (!document.is_object() || !document.contains("features") ||
      !document["features"].is_array()) {
    ThrowData("schema document needs a top-level \"features\" array");
  }
  std::vector<FeatureSpec> features;
  try {
    for (const auto& entry : document["features"]) {
      FeatureSpec f;
      f.name = entry.at("name").get<std::string>();
      const std::string kind = entry.value("kind", "categorical");
      if (kind == "categorical") {
        f.kind = FeatureKind::kCategorical;
      } else if (kind == "binned-numeric") {
        f.kind = FeatureKind::kBinnedNumeric;
      } else {
        ThrowData("feature '" + f.name + "' has unknown kind '" + kind + "'");
      }
      f.categories = entry.at("categories").get<std::vector<std::string>>();
      if (entry.contains("bin_edges")) {
        f.bin_edges = entry["bin_edges"].get<std::vector<double>>();
      }
      if (entry.contains("numeric_representatives")) {
        f.numeric_representatives =
            entry["numeric_representatives"].get<std::vector<double>>();
      }
      features.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("malformed schema: ") + e.what());
  }
  return std::make_shared<const Schema>(std::move(features));
}

SchemaPtr LoadSchemaFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open schema file " + path);
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    ThrowData("schema file " + path + " is not valid JSON: " + e.what());
  }
  return SchemaFromJson(document);
}

void SaveSchemaFile(const Schema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) ThrowIo("cannot write schema file " + path);
  out << SchemaToJson(schema).dump(2) << "\n";
}

Dataset::Dataset(SchemaPtr schema) : schema_(std::move(schema)) {}

Dataset::Dataset(SchemaPtr schema, std::vector<Category> cells)
    : schema_(std::move(schema)), cells_(std::move(cells)) {
  const auto width = static_cast<std::size_t>(schema_->num_features());
  if (cells_.size() % width != 0) {
    ThrowData("cell count " + std::to_string(cells_.size()) +
              " is not a multiple of the feature count");
  }
  num_rows_ = static_cast<int>(cells_.size() / width);
}

void Dataset::AppendRow(std::span<const Category> values) {
  if (static_cast<int>(values.size()) != num_features()) {
    ThrowData("row has " + std::to_string(values.size()) +
              " values, schema has " + std::to_string(num_features()));
  }
  cells_.insert(cells_.end(), values.begin(), values.end());
  ++num_rows_;
}

void Dataset::Reserve(int rows) {
  cells_.reserve(static_cast<std::size_t>(rows) * num_features());
}

Category BinNumeric(double value, const FeatureSpec& spec) {
  if (spec.kind != FeatureKind::kBinnedNumeric) {
    ThrowData("feature '" + spec.name + "' is not binned-numeric");
  }
  if (std::isnan(value)) {
    ThrowData("cannot bin NaN for feature '" + spec.name + "'");
  }
  auto it = std::upper_bound(spec.bin_edges.begin(), spec.bin_edges.end(),
                             value);
  return static_cast<Category>(it - spec.bin_edges.begin());
}

std::vector<Violation> Validate(const Dataset& dataset) {
  std::vector<Violation> violations;
  const Schema& schema = dataset.schema();
  const int m = schema.num_features();
  if (dataset.cells().size() !=
      static_cast<std::size_t>(dataset.num_rows()) * m) {
    violations.push_back({-1, -1, "cell buffer does not match N x M"});
    return violations;
  }
  for (int r = 0; r < dataset.num_rows(); ++r) {
    for (int c = 0; c < m; ++c) {
      const Category v = dataset.at(r, c);
      if (v < 0 || v >= schema.num_categories(c)) {
        std::ostringstream msg;
        msg << "row " << r << " column '" << schema.feature(c).name
            << "': value " << v << " outside [0, "
            << schema.num_categories(c) << ")";
        violations.push_back({r, c, msg.str()});
      }
    }
  }
  return violations;
}

}  // namespace pegs
