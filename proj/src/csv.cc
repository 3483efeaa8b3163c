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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pegs/error.h"
#include "pegs/schema.h"

namespace pegs {
namespace {

// Splits RFC 4180-style text into rows of fields. Quotes may wrap a field;
// a doubled quote inside a quoted field is a literal quote.
std::vector<std::vector<std::string>> SplitRecords(std::string_view text,
                                                   char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content || fields.size() > 1 || !fields[0].empty()) {
      rows.push_back(std::move(fields));
    }
    fields.clear();
    row_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
      row_has_content = true;
    } else if (ch == delimiter) {
      end_field();
      row_has_content = true;
    } else if (ch == '\n') {
      end_row();
    } else if (ch == '\r') {
      // Tolerate CRLF line endings.
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes) ThrowData("unterminated quoted field at end of input");
  if (!field.empty() || !fields.empty() || row_has_content) end_row();
  return rows;
}

bool NeedsQuoting(const std::string& s, char delimiter) {
  return s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
             std::string::npos ||
         s.empty();
}

void AppendField(std::string& out, const std::string& s, char delimiter) {
  if (!NeedsQuoting(s, delimiter)) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

}  // namespace

Dataset ParseCsv(std::string_view text, SchemaPtr schema,
                 const CsvOptions& options) {
  const auto rows = SplitRecords(text, options.delimiter);
  const int m = schema->num_features();
  std::vector<int> column_of(m);
  std::size_t width = m;
  std::size_t first_data = 0;
  if (options.header) {
    if (rows.empty()) ThrowData("CSV input has no header row");
    const auto& header = rows[0];
    width = header.size();
    for (int i = 0; i < m; ++i) {
      const std::string& name = schema->feature(i).name;
      column_of[i] = -1;
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) {
          column_of[i] = static_cast<int>(c);
          break;
        }
      }
      if (column_of[i] < 0) ThrowData("CSV header lacks column '" + name + "'");
    }
    first_data = 1;
  } else {
    for (int i = 0; i < m; ++i) column_of[i] = i;
  }

  Dataset dataset(schema);
  dataset.Reserve(static_cast<int>(rows.size() - first_data));
  Record record(m);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    const std::size_t data_row = r - first_data;
    if (fields.size() != width) {
      ThrowData("row " + std::to_string(data_row) + " has " +
                std::to_string(fields.size()) + " columns, expected " +
                std::to_string(width));
    }
    for (int i = 0; i < m; ++i) {
      const std::string& label = fields[column_of[i]];
      std::optional<Category> index;
      if (label == options.missing_token) {
        index = schema->MissingCategory(i);
        if (!index) {
          index = schema->CategoryIndex(i, label);
        }
        if (!index) {
          ThrowData("row " + std::to_string(data_row) + " column '" +
                    schema->feature(i).name +
                    "': missing value but the schema declares no NA category");
        }
      } else {
        index = schema->CategoryIndex(i, label);
      }
      if (!index) {
        ThrowData("row " + std::to_string(data_row) + " column '" +
                  schema->feature(i).name + "': unknown category label '" +
                  label + "'");
      }
      record[i] = *index;
    }
    dataset.AppendRow(record);
  }
  return dataset;
}

Dataset LoadCsv(const std::string& path, SchemaPtr schema,
                const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot open CSV file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), std::move(schema), options);
}

std::string FormatCsv(const Dataset& dataset, char delimiter) {
  const Schema& schema = dataset.schema();
  std::string out;
  for (int i = 0; i < schema.num_features(); ++i) {
    if (i > 0) out.push_back(delimiter);
    AppendField(out, schema.feature(i).name, delimiter);
  }
  out.push_back('\n');
  for (int r = 0; r < dataset.num_rows(); ++r) {
    for (int i = 0; i < schema.num_features(); ++i) {
      if (i > 0) out.push_back(delimiter);
      AppendField(out, schema.feature(i).categories[dataset.at(r, i)],
                  delimiter);
    }
    out.push_back('\n');
  }
  return out;
}

void WriteCsv(const Dataset& dataset, const std::string& path,
              char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowIo("cannot write CSV file " + path);
  out << FormatCsv(dataset, delimiter);
  if (!out) ThrowIo("write failed for " + path);
}

}  // namespace pegs
