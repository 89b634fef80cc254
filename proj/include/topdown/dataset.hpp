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
#include <string>
#include <vector>

#include "topdown/scene.hpp"
#include "vendor_json.hpp"

namespace topdown {

inline constexpr int kDatasetVersion = 1;

/// Reads one Scene per line (JSON, `"v": 1`). Every scene is validated; errors
/// carry the 1-based line number.
std::vector<Scene> load_dataset(const std::filesystem::path& path);

/// Writes one Scene per line. Doubles are printed in shortest round-trip form
/// so load_dataset(save_dataset(s)) == s bit for bit.
void save_dataset(const std::vector<Scene>& scenes, const std::filesystem::path& path);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace topdown
