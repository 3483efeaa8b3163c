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

#ifndef PEGS_MANIFEST_H_
#define PEGS_MANIFEST_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pegs {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct FileDigest {
  std::string path;
  std::string sha256;
};

// Provenance record written next to every output of a command. Replaying
// the argument vector from the working directory regenerates the outputs.
struct RunManifest {
  std::string tool_version{kToolVersion};
  std::string command;
  std::vector<std::string> argv;  // arguments after the program name
  std::string working_directory;
  std::string schema_sha256;
  std::string blocks_sha256;
  nlohmann::json privacy;  // null when not applicable
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

std::string Sha256Hex(std::string_view bytes);
// Throws PegsError(kIo) when the file cannot be read.
std::string Sha256File(const std::string& path);

// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string UtcTimestamp();

nlohmann::json ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(const nlohmann::json& j);

// "<output>.manifest.json".
std::string ManifestPathFor(const std::string& output);
void SaveManifest(const RunManifest& manifest, const std::string& path);
RunManifest LoadManifest(const std::string& path);

// Writes the manifest beside each of its outputs.
void WriteManifests(const RunManifest& manifest);

// True when every listed output exists with the recorded digest.
bool OutputsMatch(const RunManifest& manifest);

}  // namespace pegs

#endif  // PEGS_MANIFEST_H_
