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

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "topdown/scene.hpp"

namespace topdown::synth {

enum class TemplateKind { kStraightCruise, kFourWayJunctionTurn, kLeadFollow, kRedLightStop };
enum class Heading { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3 };
enum class Turn { kLeft, kRight };

std::string_view to_string(TemplateKind k);
TemplateKind template_kind_from_string(std::string_view s);
inline constexpr TemplateKind kAllTemplates[] = {
    TemplateKind::kStraightCruise, TemplateKind::kFourWayJunctionTurn, TemplateKind::kLeadFollow,
    TemplateKind::kRedLightStop};

/// A four-way junction of two 2+2-lane roads crossing at `center`.
struct JunctionSite {
  Vec2 center;
  double lane_width = 3.5;
};

/// Junction box half-size: the outer-lane right turn has radius 14 m.
double junction_half_size(const JunctionSite& site);
/// Distance from the junction center to the stop line of each approach.
double stop_line_offset(const JunctionSite& site);

/// Template-specific parameters; fields a template does not use are ignored.
struct TemplateParams {
  double speed = 3.0;                 // target speed at t, m/s
  Heading heading = Heading::kNorth;  // straight_cruise travel direction
  Turn turn = Turn::kLeft;            // four_way_junction_turn
  double turn_delay = 0.5;            // s after t at which the turn arc begins
  double stop_distance = 20.0;        // red_light_stop: target to stop line at t, m
  double lead_speed = 0.0;            // lead_follow: constant lead speed, m/s
  double gap = 15.0;                  // lead_follow: centre-to-centre gap at t, m
  double approach_distance = 10.0;    // cruise / lead_follow: target to junction box at t, m
  int lane = 1;                       // 0 = inner lane, 1 = outer lane
  double vehicle_length = 4.5;
  double vehicle_width = 1.9;
  int background = 0;                 // pedestrians / cyclists on the sidewalks
  JunctionSite site;
};

struct ScenarioTemplate {
  TemplateKind kind = TemplateKind::kStraightCruise;
  TemplateParams params;
  std::uint64_t seed = 0;
};

/// Braking deceleration bound for scripted agents. A step change in
/// deceleration of `a` shifts the central-difference velocity by a/8, so this
/// keeps stored velocities within 0.1 m/s of their finite differences.
inline constexpr double kMaxScriptedDecel = 0.8;
inline constexpr double kMaxSpeed = 20.0;
inline constexpr std::int64_t kTargetId = 1;

/// Throws topdown::Error("synthgen", ...) for out-of-range parameters.
void validate(const ScenarioTemplate& tmpl);

/// Renders a template into a Scene. Pure function of the template.
Scene generate(const ScenarioTemplate& tmpl);

/// Kinematic state of one scripted agent at time tau (seconds relative to t).
struct AgentSample {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
  double heading = 0.0;
};

/// Samples the target's scripted motion at arbitrary times (for tests and the
/// braking oracle).
AgentSample sample_target(const ScenarioTemplate& tmpl, double tau);

struct Split {
  std::vector<Scene> train;
  std::vector<Scene> test;
  std::vector<ScenarioTemplate> train_templates;
  std::vector<ScenarioTemplate> test_templates;
};

/// Draws `n_train` + `n_test` scenes, cycling through `kinds` in order so each
/// kind gets an equal share. Train and test use disjoint junction sites.
Split generate_split(int n_train, int n_test, std::uint64_t seed,
                     const std::vector<TemplateKind>& kinds = {std::begin(kAllTemplates),
                                                               std::end(kAllTemplates)});

/// Junction sites used by each split.
std::vector<JunctionSite> train_sites(std::uint64_t seed);
std::vector<JunctionSite> test_sites(std::uint64_t seed);

/// Draws the parameters generate_split uses for one scene.
ScenarioTemplate sample_template(TemplateKind kind, const JunctionSite& site, std::uint64_t seed);

}  // namespace topdown::synth
