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

#include "topdown/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "topdown/error.hpp"
#include "topdown/rng.hpp"

namespace topdown::synth {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("synthgen", msg); }

constexpr double kArmLength = 60.0;
constexpr double kRightTurnRadius = 14.0;
constexpr double kStopLineSetback = 4.5;
constexpr double kStopMargin = 0.25;
constexpr double kFollowClearance = 2.5;
constexpr double kPathRunway = 300.0;

// Exact rotation by k quarter turns counter-clockwise.
Vec2 rotq(Vec2 v, int k) {
  switch (((k % 4) + 4) % 4) {
    case 1: return {-v.y, v.x};
    case 2: return {-v.x, -v.y};
    case 3: return {v.y, -v.x};
    default: return v;
  }
}

struct Segment {
  bool arc = false;
  Vec2 start;        // straight
  Vec2 dir;          // straight, unit
  Vec2 center;       // arc
  double radius = 0.0;
  double start_angle = 0.0;
  double sense = 1.0;  // +1 counter-clockwise, -1 clockwise
  double length = 0.0;
};

struct PathPoint {
  Vec2 position;
  Vec2 tangent;
  double curvature = 0.0;  // signed, positive turns left
};

class Path {
 public:
  void add_straight(Vec2 start, Vec2 dir, double length) {
    Segment s;
    s.start = start;
    s.dir = dir;
    s.length = length;
    segments_.push_back(s);
  }
  void add_arc(Vec2 center, double radius, double start_angle, double sense, double sweep) {
    Segment s;
    s.arc = true;
    s.center = center;
    s.radius = radius;
    s.start_angle = start_angle;
    s.sense = sense;
    s.length = radius * sweep;
    segments_.push_back(s);
  }

  // Arc-length positions before the first segment or past the last one
  // extend the end segments.
  PathPoint at(double s) const {
    std::size_t i = 0;
    while (i + 1 < segments_.size() && s >= segments_[i].length) {
      s -= segments_[i].length;
      ++i;
    }
    const Segment& g = segments_[i];
    if (!g.arc) return {g.start + s * g.dir, g.dir, 0.0};
    const double ang = g.start_angle + g.sense * s / g.radius;
    const Vec2 radial{std::cos(ang), std::sin(ang)};
    const Vec2 tangent = g.sense * Vec2{-radial.y, radial.x};
    return {g.center + g.radius * radial, tangent, g.sense / g.radius};
  }

 private:
  std::vector<Segment> segments_;
};

// Constant speed, optionally followed (for tau > 0) by constant braking down
// to `final_speed`.
struct SpeedProfile {
  double v0 = 0.0;
  double decel = 0.0;
  double final_speed = 0.0;

  double stop_time() const { return decel > 0.0 ? (v0 - final_speed) / decel : 0.0; }

  double distance(double tau) const {
    if (decel <= 0.0 || tau <= 0.0) return v0 * tau;
    const double u = std::min(tau, stop_time());
    return v0 * u - 0.5 * decel * u * u + final_speed * (tau - u);
  }
  double speed(double tau) const {
    if (decel <= 0.0 || tau <= 0.0) return v0;
    return tau < stop_time() ? v0 - decel * tau : final_speed;
  }
  double accel(double tau) const {
    return (decel > 0.0 && tau > 0.0 && tau < stop_time()) ? -decel : 0.0;
  }
};

struct Agent {
  std::int64_t id = 0;
  EntityClass cls = EntityClass::kVehicle;
  Extent extent;
  std::array<double, 3> cov{};
  Path path;
  double s0 = 0.0;  // arc length at tau = 0
  SpeedProfile profile;

  AgentSample sample(double tau) const {
    const PathPoint p = path.at(s0 + profile.distance(tau));
    const double v = profile.speed(tau);
    const Vec2 normal{-p.tangent.y, p.tangent.x};
    AgentSample out;
    out.position = p.position;
    out.velocity = v * p.tangent;
    out.acceleration = profile.accel(tau) * p.tangent + (v * v * p.curvature) * normal;
    out.heading = wrap_angle(std::atan2(p.tangent.y, p.tangent.x));
    return out;
  }
};

// Everything below is built in a canonical frame: junction at the origin,
// target approaching from the south (northbound). `Placement` maps it to the
// world.
struct Placement {
  Vec2 center;
  int quarter_turns = 0;

  Vec2 point(Vec2 p) const { return center + rotq(p, quarter_turns); }
  Vec2 vector(Vec2 v) const { return rotq(v, quarter_turns); }
  double heading(double h) const { return wrap_angle(h + quarter_turns * (M_PI / 2.0)); }
};

struct Geometry {
  double w;   // lane width
  double J;   // junction half-size
  double S;   // stop line offset from centre
  explicit Geometry(const JunctionSite& site)
      : w(site.lane_width), J(junction_half_size(site)), S(stop_line_offset(site)) {}
  double lane_x(int lane) const { return lane == 0 ? 0.5 * w : 1.5 * w; }
  double left_radius() const { return J + 0.5 * w; }
  double right_radius() const { return J - 1.5 * w; }
};

std::vector<Vec2> rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Lane-wide corridor polygon around a sampled centre path.
std::vector<Vec2> corridor(const Path& path, double length, double half_width, int samples) {
  std::vector<Vec2> left, right;
  for (int i = 0; i <= samples; ++i) {
    const PathPoint p = path.at(length * i / samples);
    const Vec2 n{-p.tangent.y, p.tangent.x};
    left.push_back(p.position + half_width * n);
    right.push_back(p.position - half_width * n);
  }
  std::vector<Vec2> poly = right;
  poly.insert(poly.end(), left.rbegin(), left.rend());
  return poly;
}

enum Maneuver { kLeftTurn = 0, kStraight = 1, kRightTurn = 2 };

Path connection_path(const Geometry& g, Maneuver m, double* length) {
  Path p;
  if (m == kStraight) {
    p.add_straight({g.lane_x(1), -g.J}, {0.0, 1.0}, 2.0 * g.J);
    *length = 2.0 * g.J;
  } else if (m == kLeftTurn) {
    p.add_arc({-g.J, -g.J}, g.left_radius(), 0.0, 1.0, M_PI / 2.0);
    *length = g.left_radius() * M_PI / 2.0;
  } else {
    p.add_arc({g.J, -g.J}, g.right_radius(), M_PI, -1.0, M_PI / 2.0);
    *length = g.right_radius() * M_PI / 2.0;
  }
  return p;
}

std::int64_t connection_id(int world_arm, Maneuver m) { return 10 * (world_arm + 1) + m; }

std::vector<RoadElement> build_road(const Geometry& g, const Placement& place) {
  std::vector<RoadElement> road;
  auto add = [&](RoadKind kind, std::vector<Vec2> pts, int arm, std::optional<std::int64_t> id = {}) {
    RoadElement r;
    r.kind = kind;
    const Placement arm_place{place.center, place.quarter_turns + arm};
    for (Vec2 p : pts) r.geometry.push_back(arm_place.point(p));
    r.connection_id = id;
    road.push_back(std::move(r));
  };

  const double w = g.w;
  add(RoadKind::kDrivablePolygon, rect(-g.J, -g.J, g.J, g.J), 0);
  for (int arm = 0; arm < 4; ++arm) {
    const int world_arm = ((place.quarter_turns + arm) % 4 + 4) % 4;
    add(RoadKind::kDrivablePolygon, rect(-2.0 * w, -g.J - kArmLength, 2.0 * w, -g.J), arm);
    for (int m = kLeftTurn; m <= kRightTurn; ++m) {
      double len = 0.0;
      const Path p = connection_path(g, static_cast<Maneuver>(m), &len);
      add(RoadKind::kJunctionConnection, corridor(p, len, 0.5 * w, m == kStraight ? 1 : 8), arm,
          connection_id(world_arm, static_cast<Maneuver>(m)));
    }
    add(RoadKind::kCrosswalk, rect(-2.0 * w, -g.J - 3.5, 2.0 * w, -g.J - 0.5), arm);
    for (double x : {-w, 0.0, w}) {
      add(RoadKind::kLaneLine, {{x, -g.J - kArmLength}, {x, -g.J - 4.0}}, arm);
    }
    add(RoadKind::kStopLine, {{0.0, -g.S}, {2.0 * w, -g.S}}, arm);
  }
  return road;
}

std::vector<TrafficLightState> build_lights(const Placement& place, bool target_axis_green) {
  std::vector<TrafficLightState> lights;
  for (int world_arm = 0; world_arm < 4; ++world_arm) {
    // Canonical arm index relative to the target's approach.
    const int arm = ((world_arm - place.quarter_turns) % 4 + 4) % 4;
    const bool green = (arm % 2 == 0) == target_axis_green;
    for (int m = kLeftTurn; m <= kRightTurn; ++m) {
      Permissibility p = Permissibility::kProhibited;
      if (green) p = (m == kLeftTurn) ? Permissibility::kYield : Permissibility::kPermitted;
      lights.push_back({connection_id(world_arm, static_cast<Maneuver>(m)), p});
    }
  }
  return lights;
}

std::array<double, 3> draw_cov(std::uint64_t seed, std::uint64_t index) {
  Rng rng = Rng::substream(seed, "cov", index);
  return {rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5)};
}

Path straight_path(double x, double y_start) {
  Path p;
  p.add_straight({x, y_start}, {0.0, 1.0}, 4.0 * kPathRunway);
  return p;
}

double follow_min_gap(const TemplateParams& p) { return p.vehicle_length + kFollowClearance; }

double braking_distance_to_stop(const TemplateParams& p) {
  return p.stop_distance - 0.5 * p.vehicle_length - kStopMargin;
}

Agent make_target(const ScenarioTemplate& tmpl, const Geometry& g) {
  const TemplateParams& p = tmpl.params;
  Agent a;
  a.id = kTargetId;
  a.cls = EntityClass::kVehicle;
  a.extent = {p.vehicle_length, p.vehicle_width};
  a.cov = draw_cov(tmpl.seed, 0);
  a.profile.v0 = p.speed;
  const double y_start = -g.J - kPathRunway;

  switch (tmpl.kind) {
    case TemplateKind::kStraightCruise:
      a.path = straight_path(g.lane_x(1), y_start);
      a.s0 = (-g.J - p.approach_distance) - y_start;
      break;
    case TemplateKind::kRedLightStop: {
      a.path = straight_path(g.lane_x(p.lane), y_start);
      a.s0 = (-g.S - p.stop_distance) - y_start;
      const double d = braking_distance_to_stop(p);
      a.profile.decel = p.speed > 0.0 ? p.speed * p.speed / (2.0 * d) : 0.0;
      a.profile.final_speed = 0.0;
      break;
    }
    case TemplateKind::kLeadFollow: {
      a.path = straight_path(g.lane_x(1), y_start);
      a.s0 = (-g.J - p.approach_distance) - y_start;
      if (p.lead_speed < p.speed) {
        const double dv = p.speed - p.lead_speed;
        a.profile.decel = dv * dv / (2.0 * (p.gap - follow_min_gap(p)));
        a.profile.final_speed = p.lead_speed;
      }
      break;
    }
    case TemplateKind::kFourWayJunctionTurn: {
      const bool left = p.turn == Turn::kLeft;
      const double x = g.lane_x(left ? 0 : 1);
      a.path.add_straight({x, y_start}, {0.0, 1.0}, kPathRunway);
      if (left) {
        a.path.add_arc({-g.J, -g.J}, g.left_radius(), 0.0, 1.0, M_PI / 2.0);
        a.path.add_straight({-g.J, 0.5 * g.w}, {-1.0, 0.0}, kPathRunway);
      } else {
        a.path.add_arc({g.J, -g.J}, g.right_radius(), M_PI, -1.0, M_PI / 2.0);
        a.path.add_straight({g.J, -1.5 * g.w}, {1.0, 0.0}, kPathRunway);
      }
      a.s0 = kPathRunway - p.speed * p.turn_delay;
      break;
    }
  }
  return a;
}

int target_quarter_turns(const ScenarioTemplate& tmpl) {
  // Canonical approach is northbound; only straight_cruise varies direction.
  if (tmpl.kind != TemplateKind::kStraightCruise) return 0;
  return static_cast<int>(tmpl.params.heading) - static_cast<int>(Heading::kNorth);
}

EntityState to_entity(const Agent& a, const AgentSample& s, const Placement& place) {
  EntityState e;
  e.entity_id = a.id;
  e.cls = a.cls;
  e.position = place.point(s.position);
  e.velocity = place.vector(s.velocity);
  e.acceleration = place.vector(s.acceleration);
  e.heading = place.heading(s.heading);
  e.extent = a.extent;
  e.cov_norms = a.cov;
  return e;
}

}  // namespace

std::string_view to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::kStraightCruise: return "straight_cruise";
    case TemplateKind::kFourWayJunctionTurn: return "four_way_junction_turn";
    case TemplateKind::kLeadFollow: return "lead_follow";
    case TemplateKind::kRedLightStop: return "red_light_stop";
  }
  return "?";
}

TemplateKind template_kind_from_string(std::string_view s) {
  for (TemplateKind k : kAllTemplates) {
    if (to_string(k) == s) return k;
  }
  fail("unknown template '" + std::string(s) + "'");
}

double junction_half_size(const JunctionSite& site) {
  return 1.5 * site.lane_width + kRightTurnRadius;
}

double stop_line_offset(const JunctionSite& site) {
  return junction_half_size(site) + kStopLineSetback;
}

void validate(const ScenarioTemplate& tmpl) {
  const TemplateParams& p = tmpl.params;
  auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
  if (!in(p.speed, 0.0, kMaxSpeed)) fail("speed must lie in [0, 20] m/s");
  if (!in(p.site.lane_width, 2.5, 5.0)) fail("lane_width must lie in [2.5, 5] m");
  if (!finite(p.site.center)) fail("junction center must be finite");
  if (!(p.vehicle_length > 0.0) || !(p.vehicle_width > 0.0)) fail("vehicle extent must be positive");
  if (p.background < 0 || p.background > 8) fail("background must lie in [0, 8]");
  if (p.lane != 0 && p.lane != 1) fail("lane must be 0 (inner) or 1 (outer)");
  if (!std::isfinite(p.approach_distance)) fail("approach_distance must be finite");

  switch (tmpl.kind) {
    case TemplateKind::kStraightCruise:
      break;
    case TemplateKind::kFourWayJunctionTurn: {
      if (!in(p.turn_delay, 0.0, 5.0)) fail("turn_delay must lie in [0, 5] s");
      const Geometry g(p.site);
      const double r = p.turn == Turn::kLeft ? g.left_radius() : g.right_radius();
      if (p.speed * p.speed / r > 5.0) fail("turn speed exceeds the 5 m/s^2 lateral limit");
      break;
    }
    case TemplateKind::kLeadFollow: {
      if (!in(p.lead_speed, 0.0, kMaxSpeed)) fail("lead_speed must lie in [0, 20] m/s");
      if (!(p.gap > p.vehicle_length)) fail("gap must exceed the vehicle length");
      if (p.lead_speed < p.speed) {
        const double room = p.gap - follow_min_gap(p);
        const double dv = p.speed - p.lead_speed;
        if (room <= 0.0 || dv * dv / (2.0 * room) > kMaxScriptedDecel) {
          fail("gap too small to match the lead speed within the braking limit");
        }
      }
      break;
    }
    case TemplateKind::kRedLightStop: {
      const double d = braking_distance_to_stop(p);
      if (!(d > 0.0)) fail("stop_distance too short for the vehicle length");
      if (p.speed * p.speed / (2.0 * d) > kMaxScriptedDecel) {
        fail("stop_distance too short to stop within the braking limit");
      }
      break;
    }
  }
}

AgentSample sample_target(const ScenarioTemplate& tmpl, double tau) {
  validate(tmpl);
  const Geometry g(tmpl.params.site);
  const Placement place{tmpl.params.site.center, target_quarter_turns(tmpl)};
  const Agent a = make_target(tmpl, g);
  AgentSample s = a.sample(tau);
  s.position = place.point(s.position);
  s.velocity = place.vector(s.velocity);
  s.acceleration = place.vector(s.acceleration);
  s.heading = place.heading(s.heading);
  return s;
}

Scene generate(const ScenarioTemplate& tmpl) {
  validate(tmpl);
  const TemplateParams& p = tmpl.params;
  const Geometry g(p.site);
  const Placement place{p.site.center, target_quarter_turns(tmpl)};

  std::vector<Agent> agents;
  agents.push_back(make_target(tmpl, g));

  if (tmpl.kind == TemplateKind::kLeadFollow) {
    Rng rng = Rng::substream(tmpl.seed, "lead");
    Agent lead;
    lead.id = kTargetId + 1;
    lead.extent = {rng.uniform(4.2, 4.8), rng.uniform(1.8, 2.0)};
    lead.cov = draw_cov(tmpl.seed, 1);
    const double y_start = -g.J - kPathRunway;
    lead.path = straight_path(g.lane_x(1), y_start);
    lead.s0 = (-g.J - p.approach_distance + p.gap) - y_start;
    lead.profile.v0 = p.lead_speed;
    agents.push_back(std::move(lead));
  }

  for (int i = 0; i < p.background; ++i) {
    Rng rng = Rng::substream(tmpl.seed, "background", static_cast<std::uint64_t>(i));
    Agent b;
    b.id = 10 + i;
    const bool cyclist = rng.uniform() < 0.3;
    b.cls = cyclist ? EntityClass::kCyclist : EntityClass::kPedestrian;
    b.extent = cyclist ? Extent{1.8, 0.6} : Extent{0.5, 0.5};
    b.cov = draw_cov(tmpl.seed, 2 + static_cast<std::uint64_t>(i));
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double x = side * (2.0 * g.w + 1.5);
    const double y = rng.uniform(-g.J - 25.0, -g.J + 5.0);
    const double dir = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b.path.add_straight({x, y - dir * kPathRunway}, {0.0, dir}, 2.0 * kPathRunway);
    b.s0 = kPathRunway;
    b.profile.v0 = cyclist ? rng.uniform(3.0, 4.5) : rng.uniform(1.0, 1.5);
    agents.push_back(std::move(b));
  }

  const bool target_axis_green = tmpl.kind != TemplateKind::kRedLightStop;
  const std::vector<TrafficLightState> lights = build_lights(place, target_axis_green);

  Scene scene;
  scene.target_id = kTargetId;
  scene.road = build_road(g, place);
  for (int f = 0; f < kNumFrames; ++f) {
    const double tau = -kFrameSpacing * (kNumFrames - 1 - f);
    Frame frame;
    frame.timestamp = tau;
    for (const Agent& a : agents) frame.entities.push_back(to_entity(a, a.sample(tau), place));
    frame.lights = lights;
    scene.frames.push_back(std::move(frame));
  }
  const Vec2 origin = place.point(agents[0].sample(0.0).position);
  for (int t = 0; t < kHorizon; ++t) {
    scene.future[t] = place.point(agents[0].sample(kFutureStep * (t + 1)).position) - origin;
  }
  validate(scene);
  return scene;
}

std::vector<JunctionSite> train_sites(std::uint64_t seed) {
  std::vector<JunctionSite> sites;
  for (int i = 0; i < 12; ++i) {
    Rng rng = Rng::substream(seed, "train-site", static_cast<std::uint64_t>(i));
    sites.push_back({{1000.0 * (i + 1), 2000.0}, rng.uniform(3.2, 3.8)});
  }
  return sites;
}

std::vector<JunctionSite> test_sites(std::uint64_t seed) {
  std::vector<JunctionSite> sites;
  for (int i = 0; i < 4; ++i) {
    Rng rng = Rng::substream(seed, "test-site", static_cast<std::uint64_t>(i));
    sites.push_back({{1000.0 * (i + 1), -2000.0}, rng.uniform(3.2, 3.8)});
  }
  return sites;
}

ScenarioTemplate sample_template(TemplateKind kind, const JunctionSite& site, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "params");
  ScenarioTemplate t;
  t.kind = kind;
  t.seed = splitmix64(seed ^ 0x5ce7e5eedULL);
  TemplateParams& p = t.params;
  p.site = site;
  p.vehicle_length = rng.uniform(4.2, 4.8);
  p.vehicle_width = rng.uniform(1.8, 2.0);
  p.background = static_cast<int>(rng.uniform_int(3));
  switch (kind) {
    case TemplateKind::kStraightCruise:
      p.lane = 1;
      p.speed = rng.uniform(2.0, 4.8);
      p.heading = static_cast<Heading>(rng.uniform_int(4));
      p.approach_distance = rng.uniform(-10.0, 30.0);
      break;
    case TemplateKind::kFourWayJunctionTurn:
      p.turn = rng.uniform_int(2) == 0 ? Turn::kLeft : Turn::kRight;
      p.lane = p.turn == Turn::kLeft ? 0 : 1;
      p.speed = rng.uniform(2.5, 3.2);
      p.turn_delay = rng.uniform(0.05, 1.0);
      break;
    case TemplateKind::kLeadFollow: {
      p.lane = 1;
      p.speed = rng.uniform(3.0, 4.8);
      p.lead_speed = rng.uniform(0.0, p.speed - 1.5);
      const double dv = p.speed - p.lead_speed;
      const double room = dv * dv / (2.0 * kMaxScriptedDecel);
      p.gap = p.vehicle_length + kFollowClearance + rng.uniform(room + 0.5, room + 6.0);
      p.approach_distance = rng.uniform(5.0, 30.0);
      break;
    }
    case TemplateKind::kRedLightStop: {
      p.lane = static_cast<int>(rng.uniform_int(2));
      p.speed = rng.uniform(3.0, 4.8);
      const double min_d =
          p.speed * p.speed / (2.0 * kMaxScriptedDecel) + 0.5 * p.vehicle_length + kStopMargin + 0.5;
      p.stop_distance = rng.uniform(std::max(min_d, 10.0), 24.0);
      break;
    }
  }
  return t;
}

Split generate_split(int n_train, int n_test, std::uint64_t seed, const std::vector<TemplateKind>& kinds) {
  if (n_train < 0 || n_test < 0) fail("split sizes must be non-negative");
  if (kinds.empty()) fail("at least one template kind is required");
  Split out;
  auto build = [&](int n, const std::vector<JunctionSite>& sites, std::string_view purpose,
                   std::vector<ScenarioTemplate>& templates, std::vector<Scene>& scenes) {
    templates.resize(static_cast<std::size_t>(n));
    scenes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Rng rng = Rng::substream(seed, purpose, static_cast<std::uint64_t>(i));
      const JunctionSite& site = sites[rng.uniform_int(sites.size())];
      templates[i] = sample_template(kinds[static_cast<std::size_t>(i) % kinds.size()], site, rng.next_u64());
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      try {
        scenes[i] = generate(templates[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  };
  build(n_train, train_sites(seed), "train", out.train_templates, out.train);
  build(n_test, test_sites(seed), "test", out.test_templates, out.test);
  return out;
}

}  // namespace topdown::synth
