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

#include "pegs/blocks.h"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pegs/error.h"
#include "pegs/parallel.h"

namespace pegs {
namespace {

constexpr char kMagic[8] = {'P', 'E', 'G', 'S', 'B', 'L', 'K', '\0'};

FeatureTable CountFeature(const Dataset& dataset, HashSpec spec) {
  FeatureTable table;
  const int feature = spec.target;
  const int c = dataset.schema().num_categories(feature);
  table.hash = std::move(spec);
  table.marginal.assign(c, 0);
  for (int r = 0; r < dataset.num_rows(); ++r) {
    const auto row = dataset.row(r);
    const std::uint64_t key = HashRecord(row, table.hash);
    CountRow& counts = table.rows[key];
    if (counts.counts.empty()) counts.counts.assign(c, 0);
    ++counts.counts[row[feature]];
    ++counts.total;
    ++table.marginal[row[feature]];
  }
  return table;
}

class Writer {
 public:
  void Bytes(const void* data, std::size_t n) {
    out_.append(static_cast<const char*>(data), n);
  }
  void U32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<char>(v >> (8 * b)));
  }
  void U64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out_.push_back(static_cast<char>(v >> (8 * b)));
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(bytes_[pos_ + b]))
           << (8 * b);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + b]))
           << (8 * b);
    }
    pos_ += 8;
    return v;
  }
  std::string_view Bytes(std::size_t n) {
    Need(n);
    auto view = bytes_.substr(pos_, n);
    pos_ += n;
    return view;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) ThrowData("blocks file is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk =
        std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset),
                static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

BuildingBlocks DisintegrateWithSpecs(const Dataset& dataset,
                                     std::vector<HashSpec> specs) {
  const int m = dataset.num_features();
  if (static_cast<int>(specs.size()) != m) {
    ThrowUsage("need one hash spec per feature");
  }
  BuildingBlocks blocks;
  blocks.schema = dataset.schema_ptr();
  blocks.num_rows = dataset.num_rows();
  blocks.tables.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (specs[i].target != i) ThrowUsage("hash spec order must match features");
    blocks.tables.push_back(CountFeature(dataset, std::move(specs[i])));
  }
  return blocks;
}

BuildingBlocks Disintegrate(const Dataset& dataset, int m, int threads) {
  if (auto violations = Validate(dataset); !violations.empty()) {
    ThrowData("cannot disintegrate invalid dataset: " +
              violations.front().message);
  }
  const int num_features = dataset.num_features();
  BuildingBlocks blocks;
  blocks.schema = dataset.schema_ptr();
  blocks.num_rows = dataset.num_rows();
  blocks.tables.resize(num_features);
  ParallelFor(num_features, threads, [&](int i) {
    blocks.tables[i] = CountFeature(dataset, BuildHashSpec(dataset, i, m));
  });
  return blocks;
}

void PerturbedConditional(const CountRow* row, int num_categories,
                          double alpha, std::span<double> out) {
  if (!(alpha >= 0.0)) {
    ThrowPrivacy("alpha must be non-negative");
  }
  const std::int64_t total = row ? row->total : 0;
  const double denom = static_cast<double>(total) + num_categories * alpha;
  if (denom <= 0.0) {
    ThrowData("conditional is undefined: alpha = 0 on an empty hash key");
  }
  for (int j = 0; j < num_categories; ++j) {
    const double n = row ? static_cast<double>(row->counts[j]) : 0.0;
    out[j] = (n + alpha) / denom;
  }
}

std::vector<double> PerturbedConditional(const CountRow* row,
                                         int num_categories, double alpha) {
  std::vector<double> out(num_categories);
  PerturbedConditional(row, num_categories, alpha, out);
  return out;
}

std::vector<double> Conditional(const BuildingBlocks& blocks, int feature,
                                std::uint64_t key, double alpha,
                                PriorShape prior) {
  const FeatureTable& table = blocks.tables.at(feature);
  const int c = blocks.schema->num_categories(feature);
  const CountRow* row = table.Find(key);
  if (prior == PriorShape::kUniform) {
    return PerturbedConditional(row, c, alpha);
  }
  if (!(alpha >= 0.0)) ThrowPrivacy("alpha must be non-negative");
  std::int64_t marginal_total = 0;
  for (auto n : table.marginal) marginal_total += n;
  if (marginal_total == 0) return PerturbedConditional(row, c, alpha);
  const std::int64_t total = row ? row->total : 0;
  const double denom = static_cast<double>(total) + c * alpha;
  if (denom <= 0.0) {
    ThrowData("conditional is undefined: alpha = 0 on an empty hash key");
  }
  std::vector<double> out(c);
  double sum = 0.0;
  for (int j = 0; j < c; ++j) {
    const double prior_j = c * alpha * static_cast<double>(table.marginal[j]) /
                           static_cast<double>(marginal_total);
    out[j] = ((row ? row->counts[j] : 0) + prior_j) / denom;
    sum += out[j];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::string SerializeBlocks(const BuildingBlocks& blocks) {
  nlohmann::json header;
  header["schema"] = SchemaToJson(*blocks.schema);
  header["num_rows"] = blocks.num_rows;
  nlohmann::json specs = nlohmann::json::array();
  for (const auto& table : blocks.tables) specs.push_back(HashSpecToJson(table.hash));
  header["hash_specs"] = std::move(specs);
  const std::string header_text = header.dump();

  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kBlocksFormatVersion);
  w.U64(header_text.size());
  w.Bytes(header_text.data(), header_text.size());
  for (const auto& table : blocks.tables) {
    std::vector<std::uint64_t> keys;
    keys.reserve(table.rows.size());
    for (const auto& [key, row] : table.rows) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    w.U64(keys.size());
    for (auto n : table.marginal) w.U64(static_cast<std::uint64_t>(n));
    for (auto key : keys) {
      w.U64(key);
      for (auto n : table.rows.at(key).counts) {
        w.U64(static_cast<std::uint64_t>(n));
      }
    }
  }
  const std::uint32_t crc = Crc32(w.str());
  w.U32(crc);
  return std::move(w.str());
}

BuildingBlocks DeserializeBlocks(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    ThrowData("not a building-blocks file (bad magic)");
  }
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 4) {
    ThrowData("blocks file checksum mismatch (file truncated)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.U32() != Crc32(body)) {
    ThrowData("blocks file checksum mismatch (corrupt or truncated)");
  }
  Reader r(body);
  r.Bytes(sizeof(kMagic));
  const std::uint32_t version = r.U32();
  if (version != kBlocksFormatVersion) {
    ThrowData("blocks format version " + std::to_string(version) +
              " is not supported (expected " +
              std::to_string(kBlocksFormatVersion) + ")");
  }
  const std::uint64_t header_len = r.U64();
  if (header_len > r.remaining()) ThrowData("blocks file is truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.Bytes(header_len));
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("blocks header is not valid JSON: ") + e.what());
  }
  BuildingBlocks blocks;
  blocks.schema = SchemaFromJson(header.at("schema"));
  blocks.num_rows = header.at("num_rows").get<std::int64_t>();
  const auto& specs = header.at("hash_specs");
  const int m = blocks.schema->num_features();
  if (static_cast<int>(specs.size()) != m) {
    ThrowData("blocks header has the wrong number of hash specs");
  }
  blocks.tables.resize(m);
  for (int i = 0; i < m; ++i) {
    FeatureTable& table = blocks.tables[i];
    table.hash = HashSpecFromJson(*blocks.schema, specs[i]);
    if (table.hash.target != i) ThrowData("hash specs are out of order");
    const int c = blocks.schema->num_categories(i);
    const std::uint64_t num_keys = r.U64();
    table.marginal.resize(c);
    for (int j = 0; j < c; ++j) table.marginal[j] = static_cast<std::int64_t>(r.U64());
    table.rows.reserve(num_keys);
    for (std::uint64_t k = 0; k < num_keys; ++k) {
      const std::uint64_t key = r.U64();
      CountRow row;
      row.counts.resize(c);
      for (int j = 0; j < c; ++j) {
        row.counts[j] = static_cast<std::int64_t>(r.U64());
        row.total += row.counts[j];
      }
      table.rows.emplace(key, std::move(row));
    }
  }
  if (r.remaining() != 0) ThrowData("trailing bytes in blocks file");
  return blocks;
}

void SaveBlocks(const BuildingBlocks& blocks, const std::string& path) {
  const std::string bytes = SerializeBlocks(blocks);
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowIo("cannot write blocks file " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) ThrowIo("write failed for " + path);
}

BuildingBlocks LoadBlocks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot open blocks file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeBlocks(buffer.str());
}

bool SameBlocks(const BuildingBlocks& a, const BuildingBlocks& b) {
  if (a.num_rows != b.num_rows || a.tables.size() != b.tables.size()) {
    return false;
  }
  if (SchemaToJson(*a.schema) != SchemaToJson(*b.schema)) return false;
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    const auto& ta = a.tables[i];
    const auto& tb = b.tables[i];
    if (HashSpecToJson(ta.hash) != HashSpecToJson(tb.hash) ||
        ta.marginal != tb.marginal || ta.rows != tb.rows) {
      return false;
    }
  }
  return true;
}

}  // namespace pegs
