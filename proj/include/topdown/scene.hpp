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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topdown/geometry.hpp"

namespace topdown {

/// Frames of past history, 2 Hz over 2.5 s inclusive of the prediction instant.
inline constexpr int kNumFrames = 6;
inline constexpr double kFrameSpacing = 0.5;
/// Future control points at 1 s intervals.
inline constexpr int kHorizon = 5;
inline constexpr double kFutureStep = 1.0;

enum class EntityClass { kVehicle, kPedestrian, kCyclist };

enum class RoadKind {
  kDrivablePolygon,
  kJunctionConnection,
  kCrosswalk,
  kLaneLine,
  kStopLine,
};

enum class Permissibility { kPermitted, kYield, kProhibited };

std::string_view to_string(EntityClass c);
std::string_view to_string(RoadKind k);
std::string_view to_string(Permissibility p);
EntityClass entity_class_from_string(std::string_view s);
RoadKind road_kind_from_string(std::string_view s);
Permissibility permissibility_from_string(std::string_view s);

/// Polygons are filled areas; the remaining kinds are polylines.
bool is_polygon_kind(RoadKind k);

struct Extent {
  double length = 0.0;
  double width = 0.0;
  friend bool operator==(const Extent&, const Extent&) = default;
};

struct EntityState {
  std::int64_t entity_id = 0;
  EntityClass cls = EntityClass::kVehicle;
  Vec2 position;      // m, world frame (x east, y north)
  Vec2 velocity;      // m/s
  Vec2 acceleration;  // m/s^2
  double heading = 0.0;
  Extent extent;
  /// Frobenius norms of the position, velocity, acceleration covariances.
  std::array<double, 3> cov_norms{};

  friend bool operator==(const EntityState&, const EntityState&) = default;
};

struct RoadElement {
  RoadKind kind = RoadKind::kLaneLine;
  std::vector<Vec2> geometry;
  std::optional<std::int64_t> connection_id;

  friend bool operator==(const RoadElement&, const RoadElement&) = default;
};

struct TrafficLightState {
  std::int64_t connection_id = 0;
  Permissibility permissibility = Permissibility::kPermitted;

  friend bool operator==(const TrafficLightState&, const TrafficLightState&) = default;
};

struct Frame {
  double timestamp = 0.0;
  std::vector<EntityState> entities;
  std::vector<TrafficLightState> lights;

  const EntityState* find(std::int64_t id) const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

using Trajectory = std::array<Vec2, kHorizon>;

struct Scene {
  std::vector<Frame> frames;  // time-ordered, frames.back() is the prediction instant
  std::vector<RoadElement> road;
  std::int64_t target_id = 0;
  /// Ground-truth displacements relative to the target position at time t.
  Trajectory future{};

  const Frame& current() const { return frames.back(); }
  /// Target state at the prediction instant. Requires a validated scene.
  const EntityState& target() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Checks every Scene invariant; throws topdown::Error naming the offending field.
void validate(const Scene& scene);

/// True if no two non-adjacent edges of the closed polygon intersect.
bool is_simple_polygon(const std::vector<Vec2>& pts);

}  // namespace topdown
