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

#ifndef PEGS_SCHEMA_H_
#define PEGS_SCHEMA_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace pegs {

// Category index of one cell. Valid values for feature i are [0, C_i).
using Category = std::int32_t;
using Record = std::vector<Category>;

enum class FeatureKind { kCategorical, kBinnedNumeric };

// One column of the data. A binned-numeric feature has len(bin_edges) + 1
// categories; bin k covers [bin_edges[k-1], bin_edges[k]) with both ends
// clamped, and numeric_representatives maps each bin back to a number.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  std::vector<std::string> categories;
  std::vector<double> bin_edges;
  std::vector<double> numeric_representatives;

  int num_categories() const { return static_cast<int>(categories.size()); }
  bool has_numeric() const { return !numeric_representatives.empty(); }
};

// Fills numeric_representatives with bin lower edges. The open-ended first
// bin gets bin_edges[0] minus the width of the second bin (or minus one when
// there is a single edge).
std::vector<double> DefaultRepresentatives(const std::vector<double>& edges);

// Ordered, validated set of features. Immutable after construction.
class Schema {
 public:
  // Throws PegsError(kData) when an invariant is violated: empty or
  // duplicate labels, duplicate names, fewer than two features, bad bins.
  explicit Schema(std::vector<FeatureSpec> features);

  int num_features() const { return static_cast<int>(features_.size()); }
  const FeatureSpec& feature(int i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  int num_categories(int i) const { return features_[i].num_categories(); }
  int max_categories() const { return max_categories_; }
  std::vector<int> Cardinalities() const;

  std::optional<int> FeatureIndex(std::string_view name) const;
  std::optional<Category> CategoryIndex(int feature,
                                        std::string_view label) const;
  // Index of the dedicated missing-value category ("NA"), if declared.
  std::optional<Category> MissingCategory(int feature) const;

  // Throws PegsError(kUsage) for an unknown name.
  int RequireFeature(std::string_view name) const;

 private:
  std::vector<FeatureSpec> features_;
  std::unordered_map<std::string, int> name_index_;
  std::vector<std::unordered_map<std::string, Category>> label_index_;
  int max_categories_ = 0;
};

using SchemaPtr = std::shared_ptr<const Schema>;

inline constexpr std::string_view kMissingLabel = "NA";

nlohmann::json SchemaToJson(const Schema& schema);
SchemaPtr SchemaFromJson(const nlohmann::json& document);
SchemaPtr LoadSchemaFile(const std::string& path);
void SaveSchemaFile(const Schema& schema, const std::string& path);

// Row-major N x M matrix of category indices.
class Dataset {
 public:
  explicit Dataset(SchemaPtr schema);
  Dataset(SchemaPtr schema, std::vector<Category> cells);

  const Schema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  int num_rows() const { return num_rows_; }
  int num_features() const { return schema_->num_features(); }

  Category at(int row, int feature) const {
    return cells_[static_cast<std::size_t>(row) * num_features() + feature];
  }
  std::span<const Category> row(int r) const {
    return {cells_.data() + static_cast<std::size_t>(r) * num_features(),
            static_cast<std::size_t>(num_features())};
  }
  const std::vector<Category>& cells() const { return cells_; }

  void AppendRow(std::span<const Category> values);
  void Reserve(int rows);

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.num_features() == b.num_features() && a.cells_ == b.cells_;
  }

 private:
  SchemaPtr schema_;
  std::vector<Category> cells_;
  int num_rows_ = 0;
};

// Maps a real value to its bin index under the half-open convention.
// Throws PegsError(kData) for NaN or for a categorical spec.
Category BinNumeric(double value, const FeatureSpec& spec);

struct Violation {
  int row;
  int column;
  std::string message;
};

// Empty iff every cell lies in [0, C_i) and the width matches the schema.
std::vector<Violation> Validate(const Dataset& dataset);

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  std::string missing_token;
};

// Parses delimited text into category indices. Throws PegsError(kIo) when
// the file cannot be read and PegsError(kData) for unknown labels, missing
// tokens without an NA category, or ragged rows.
Dataset LoadCsv(const std::string& path, SchemaPtr schema,
                const CsvOptions& options = {});
Dataset ParseCsv(std::string_view text, SchemaPtr schema,
                 const CsvOptions& options = {});

// Writes labels with a header row, quoting fields that need it.
void WriteCsv(const Dataset& dataset, const std::string& path,
              char delimiter = ',');
std::string FormatCsv(const Dataset& dataset, char delimiter = ',');

}  // namespace pegs

#endif  // PEGS_SCHEMA_H_
