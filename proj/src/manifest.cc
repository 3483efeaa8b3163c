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

#include "pegs/manifest.h"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "pegs/error.h"

namespace pegs {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      ThrowIo("cannot initialize SHA-256");
    }
  }
  void Update(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
  }
  std::string HexDigest() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int size = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &size);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < size; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

nlohmann::json DigestsToJson(const std::vector<FileDigest>& files) {
  nlohmann::json out = nlohmann::json::array();
  for (const FileDigest& f : files) {
    out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  }
  return out;
}

std::vector<FileDigest> DigestsFromJson(const nlohmann::json& j) {
  std::vector<FileDigest> out;
  for (const auto& f : j) {
    out.push_back({f.at("path").get<std::string>(),
                   f.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  Sha256 h;
  h.Update(bytes.data(), bytes.size());
  return h.HexDigest();
}

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot read " + path);
  Sha256 h;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    h.Update(buffer, static_cast<std::size_t>(in.gcount()));
  }
  return h.HexDigest();
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json ManifestToJson(const RunManifest& m) {
  return {{"tool_version", m.tool_version},
          {"command", m.command},
          {"argv", m.argv},
          {"working_directory", m.working_directory},
          {"schema_sha256", m.schema_sha256},
          {"blocks_sha256", m.blocks_sha256},
          {"privacy", m.privacy},
          {"seed", m.seed},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"inputs", DigestsToJson(m.inputs)},
          {"outputs", DigestsToJson(m.outputs)}};
}

RunManifest ManifestFromJson(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.working_directory = j.at("working_directory").get<std::string>();
    m.schema_sha256 = j.value("schema_sha256", "");
    m.blocks_sha256 = j.value("blocks_sha256", "");
    m.privacy = j.value("privacy", nlohmann::json());
    m.seed = j.value("seed", std::uint64_t{0});
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.inputs = DigestsFromJson(j.at("inputs"));
    m.outputs = DigestsFromJson(j.at("outputs"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("malformed manifest: ") + e.what());
  }
}

std::string ManifestPathFor(const std::string& output) {
  return output + ".manifest.json";
}

void SaveManifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) ThrowIo("cannot write manifest " + path);
  out << ManifestToJson(manifest).dump(2) << "\n";
  if (!out) ThrowIo("failed writing manifest " + path);
}

RunManifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    ThrowData("manifest " + path + " is not valid JSON: " + e.what());
  }
  return ManifestFromJson(j);
}

void WriteManifests(const RunManifest& manifest) {
  for (const FileDigest& f : manifest.outputs) {
    SaveManifest(manifest, ManifestPathFor(f.path));
  }
}

bool OutputsMatch(const RunManifest& manifest) {
  for (const FileDigest& f : manifest.outputs) {
    if (!std::filesystem::exists(f.path)) return false;
    if (Sha256File(f.path) != f.sha256) return false;
  }
  return !manifest.outputs.empty();
}

}  // namespace pegs
