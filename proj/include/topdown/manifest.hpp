// Copyright 2026 The Topdown Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <cstdint>
#include <string>
#include <vector>

#include "topdown/vendor_json.hpp"

namespace topdown {

/// Record of one CLI run, written atomically when the run ends.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::vector<std::string>> flags;
  std::map<std::string, std::string> config;  // key=value file contents, if any
  std::vector<std::uint64_t> seeds;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double duration_s = 0.0;
  /// Subcommand-specific extras, e.g. the template mixture of `gen`.
  nlohmann::json details = nlohmann::json::object();
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Hashes every output and writes JSON via a temporary file and rename.
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

/// Parses `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace topdown
