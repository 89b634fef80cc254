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

#include "topdown/raster.hpp"
#include "topdown/vendor_json.hpp"

namespace topdown::raster {

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeatureScaling& s);
FeatureScaling feature_scaling_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeatureGroups& g);
FeatureGroups feature_groups_from_json(const nlohmann::json& j);

}  // namespace topdown::raster
