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

#include "topdown/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "topdown/error.hpp"

namespace topdown {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("scene_model", msg); }

bool finite_extent(const Extent& e) { return std::isfinite(e.length) && std::isfinite(e.width); }

// Proper or touching intersection of closed segments ab and cd.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void validate_entity(const EntityState& e, std::size_t frame, std::size_t idx) {
  const std::string where =
      "frames[" + std::to_string(frame) + "].entities[" + std::to_string(idx) + "]";
  if (!finite(e.position)) fail(where + ".position is not finite");
  if (!finite(e.velocity)) fail(where + ".velocity is not finite");
  if (!finite(e.acceleration)) fail(where + ".acceleration is not finite");
  if (!std::isfinite(e.heading)) fail(where + ".heading is not finite");
  if (e.heading < -M_PI || e.heading >= M_PI) fail(where + ".heading outside [-pi, pi)");
  if (!finite_extent(e.extent) || e.extent.length <= 0.0 || e.extent.width <= 0.0)
    fail(where + ".extent must be positive");
  for (double c : e.cov_norms) {
    if (!std::isfinite(c) || c < 0.0) fail(where + ".cov_norms must be finite and non-negative");
  }
}

}  // namespace

std::string_view to_string(EntityClass c) {
  switch (c) {
    case EntityClass::kVehicle: return "vehicle";
    case EntityClass::kPedestrian: return "pedestrian";
    case EntityClass::kCyclist: return "cyclist";
  }
  return "?";
}

std::string_view to_string(RoadKind k) {
  switch (k) {
    case RoadKind::kDrivablePolygon: return "drivable_polygon";
    case RoadKind::kJunctionConnection: return "junction_connection";
    case RoadKind::kCrosswalk: return "crosswalk";
    case RoadKind::kLaneLine: return "lane_line";
    case RoadKind::kStopLine: return "stop_line";
  }
  return "?";
}

std::string_view to_string(Permissibility p) {
  switch (p) {
    case Permissibility::kPermitted: return "permitted";
    case Permissibility::kYield: return "yield";
    case Permissibility::kProhibited: return "prohibited";
  }
  return "?";
}

EntityClass entity_class_from_string(std::string_view s) {
  if (s == "vehicle") return EntityClass::kVehicle;
  if (s == "pedestrian") return EntityClass::kPedestrian;
  if (s == "cyclist") return EntityClass::kCyclist;
  fail("unknown entity class '" + std::string(s) + "'");
}

RoadKind road_kind_from_string(std::string_view s) {
  for (RoadKind k : {RoadKind::kDrivablePolygon, RoadKind::kJunctionConnection,
                     RoadKind::kCrosswalk, RoadKind::kLaneLine, RoadKind::kStopLine}) {
    if (to_string(k) == s) return k;
  }
  fail("unknown road element kind '" + std::string(s) + "'");
}

Permissibility permissibility_from_string(std::string_view s) {
  for (Permissibility p :
       {Permissibility::kPermitted, Permissibility::kYield, Permissibility::kProhibited}) {
    if (to_string(p) == s) return p;
  }
  fail("unknown permissibility '" + std::string(s) + "'");
}

bool is_polygon_kind(RoadKind k) {
  return k == RoadKind::kDrivablePolygon || k == RoadKind::kJunctionConnection ||
         k == RoadKind::kCrosswalk;
}

const EntityState* Frame::find(std::int64_t id) const {
  for (const auto& e : entities) {
    if (e.entity_id == id) return &e;
  }
  return nullptr;
}

const EntityState& Scene::target() const {
  const EntityState* e = current().find(target_id);
  if (e == nullptr) fail("target entity missing from the current frame");
  return *e;
}

bool is_simple_polygon(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  if (n < 3) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

void validate(const Scene& scene) {
  if (scene.frames.size() != static_cast<std::size_t>(kNumFrames)) {
    fail("expected " + std::to_string(kNumFrames) + " frames, got " +
         std::to_string(scene.frames.size()));
  }

  std::set<std::int64_t> connections;
  for (std::size_t i = 0; i < scene.road.size(); ++i) {
    const RoadElement& r = scene.road[i];
    const std::string where = "road[" + std::to_string(i) + "]";
    if (r.geometry.size() < 2) fail(where + ".geometry needs at least 2 points");
    for (const Vec2& p : r.geometry) {
      if (!finite(p)) fail(where + ".geometry is not finite");
    }
    if (is_polygon_kind(r.kind) && !is_simple_polygon(r.geometry)) {
      fail(where + ".geometry is a self-intersecting polygon");
    }
    if (r.kind == RoadKind::kJunctionConnection) {
      if (!r.connection_id) fail(where + ".connection_id required for junction_connection");
      connections.insert(*r.connection_id);
    } else if (r.connection_id) {
      fail(where + ".connection_id only allowed on junction_connection");
    }
  }

  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const Frame& frame = scene.frames[f];
    if (!std::isfinite(frame.timestamp)) fail("frames[" + std::to_string(f) + "].timestamp is not finite");
    if (f > 0) {
      const double dt = frame.timestamp - scene.frames[f - 1].timestamp;
      if (std::abs(dt - kFrameSpacing) > 1e-9) {
        fail("frames[" + std::to_string(f) + "].timestamp must follow the previous frame by 0.5 s");
      }
    }
    std::set<std::int64_t> ids;
    for (std::size_t e = 0; e < frame.entities.size(); ++e) {
      validate_entity(frame.entities[e], f, e);
      if (!ids.insert(frame.entities[e].entity_id).second) {
        fail("frames[" + std::to_string(f) + "] has duplicate entity_id " +
             std::to_string(frame.entities[e].entity_id));
      }
    }
    if (!ids.contains(scene.target_id)) {
      fail("target_id " + std::to_string(scene.target_id) + " missing from frame " + std::to_string(f));
    }
    for (const auto& light : frame.lights) {
      if (!connections.contains(light.connection_id)) {
        fail("frames[" + std::to_string(f) + "].lights references unknown connection_id " +
             std::to_string(light.connection_id));
      }
    }
  }

  for (int t = 0; t < kHorizon; ++t) {
    if (!finite(scene.future[t])) fail("future[" + std::to_string(t) + "] is not finite");
  }
}

}  // namespace topdown
