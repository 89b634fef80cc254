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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "topdown/error.hpp"
#include "topdown/eval.hpp"
#include "topdown/synthgen.hpp"

namespace topdown::synth {
namespace {

ScenarioTemplate cruise_east(double speed) {
  ScenarioTemplate t;
  t.kind = TemplateKind::kStraightCruise;
  t.params.speed = speed;
  t.params.heading = Heading::kEast;
  t.seed = 3;
  return t;
}

TEST(Synthgen, StraightCruiseEastIntegratesConstantVelocity) {
  const Scene s = generate(cruise_east(2.0));
  for (int i = 0; i < kHorizon; ++i) {
    EXPECT_NEAR(s.future[i].x, 2.0 * (i + 1), 1e-9) << i;
    EXPECT_NEAR(s.future[i].y, 0.0, 1e-9) << i;
  }
  EXPECT_NEAR(s.target().velocity.x, 2.0, 1e-12);
  EXPECT_NEAR(norm(s.target().acceleration), 0.0, 1e-12);
}

TEST(Synthgen, GenerateIsDeterministic) {
  for (auto kind : kAllTemplates) {
    const auto tmpl = sample_template(kind, JunctionSite{{40.0, -20.0}}, 99);
    EXPECT_EQ(generate(tmpl), generate(tmpl)) << to_string(kind);
  }
}

TEST(Synthgen, RedLightStopEndsBeforeStopLine) {
  ScenarioTemplate t;
  t.kind = TemplateKind::kRedLightStop;
  t.params.speed = 5.0;
  t.params.stop_distance = 20.0;
  t.params.site.center = {0.0, 0.0};
  const Scene s = generate(t);
  const double stop_y = t.params.site.center.y - stop_line_offset(t.params.site);
  const double start_y = s.target().position.y;
  EXPECT_NEAR(stop_y - start_y, 20.0, 1e-9);
  // Independent integration of the scripted braking profile: constant
  // deceleration chosen so the front bumper reaches the line at rest.
  double y = start_y;
  double v = 5.0;
  const double dt = 1e-4;
  const double decel = norm(sample_target(t, 0.5).acceleration);
  EXPECT_NEAR(decel, 25.0 / (2.0 * (20.0 - 0.5 * t.params.vehicle_length - 0.25)), 1e-12);
  for (int i = 0; i < 50000; ++i) {
    const double a = v > 0.0 ? -decel : 0.0;
    y += v * dt + 0.5 * a * dt * dt;
    v = std::max(0.0, v + a * dt);
  }
  EXPECT_NEAR(start_y + s.future[4].y, y, 1e-3);
  EXPECT_LT(start_y + s.future[4].y, stop_y);
  EXPECT_LE(start_y + s.future[4].y + 0.5 * t.params.vehicle_length, stop_y);
}

TEST(Synthgen, FutureMatchesScriptedContinuation) {
  for (auto kind : kAllTemplates) {
    const auto tmpl = sample_template(kind, JunctionSite{{0.0, 0.0}}, 5);
    const Scene s = generate(tmpl);
    const Vec2 origin = sample_target(tmpl, 0.0).position;
    for (int i = 0; i < kHorizon; ++i) {
      const Vec2 d = sample_target(tmpl, i + 1.0).position - origin;
      EXPECT_NEAR(s.future[i].x, d.x, 1e-9);
      EXPECT_NEAR(s.future[i].y, d.y, 1e-9);
    }
  }
}

class SynthgenPhysics : public ::testing::TestWithParam<int> {};

TEST_P(SynthgenPhysics, FiniteDifferenceVelocityAndLimits) {
  const auto split = generate_split(40, 0, static_cast<std::uint64_t>(GetParam()));
  for (const Scene& s : split.train) {
    ASSERT_NO_THROW(validate(s));
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
      for (const auto& e : s.frames[f].entities) {
        EXPECT_LE(norm(e.velocity), kMaxSpeed + 1e-9);
        EXPECT_LE(norm(e.acceleration), 5.0 + 1e-9);
        if (f == 0 || f + 1 == s.frames.size()) continue;
        const auto* prev = s.frames[f - 1].find(e.entity_id);
        const auto* next = s.frames[f + 1].find(e.entity_id);
        if (!prev || !next) continue;
        const Vec2 fd = (next->position - prev->position) * (1.0 / 1.0);
        EXPECT_LE(norm(fd - e.velocity), 0.1) << "entity " << e.entity_id << " frame " << f;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SynthgenPhysics, ::testing::Values(1, 2, 3));

TEST(Synthgen, EmptySplit) {
  const auto s = generate_split(0, 0, 1);
  EXPECT_TRUE(s.train.empty());
  EXPECT_TRUE(s.test.empty());
}

TEST(Synthgen, SplitSizesDisjointSitesAndEqualMixture) {
  const auto s = generate_split(100, 10, 8);
  ASSERT_EQ(s.train.size(), 100u);
  ASSERT_EQ(s.test.size(), 10u);
  std::set<std::pair<double, double>> train_centers, test_centers;
  for (const auto& t : s.train_templates) train_centers.insert({t.params.site.center.x, t.params.site.center.y});
  for (const auto& t : s.test_templates) test_centers.insert({t.params.site.center.x, t.params.site.center.y});
  for (const auto& c : test_centers) EXPECT_EQ(train_centers.count(c), 0u);
  int counts[4] = {};
  for (const auto& t : s.train_templates) ++counts[static_cast<int>(t.kind)];
  for (int c : counts) EXPECT_EQ(c, 25);
}

TEST(Synthgen, SplitIsDeterministic) {
  const auto a = generate_split(100, 10, 4);
  const auto b = generate_split(100, 10, 4);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
}

TEST(Synthgen, SeedsChangeTheData) {
  const auto a = generate_split(8, 0, 4);
  const auto b = generate_split(8, 0, 5);
  EXPECT_NE(a.train, b.train);
}

TEST(Synthgen, AddingTemplateKindKeepsOtherDrawsStable) {
  // Substreams are keyed by purpose and index, so the scene at a given index
  // only depends on the kind assigned to it.
  const auto a = generate_split(4, 0, 12, {TemplateKind::kStraightCruise});
  const auto b = generate_split(4, 0, 12, {TemplateKind::kStraightCruise, TemplateKind::kLeadFollow});
  EXPECT_EQ(a.train[0], b.train[0]);
  EXPECT_EQ(a.train[2], b.train[2]);
}

TEST(Synthgen, TurnsAreNotLinearlyExtrapolable) {
  const auto s = generate_split(60, 0, 21, {TemplateKind::kFourWayJunctionTurn});
  for (const Scene& scene : s.train) {
    const Trajectory lin = eval::linear_baseline(scene.target());
    EXPECT_GT(norm(lin[4] - scene.future[4]), 2.0);
  }
}

TEST(Synthgen, LinearIsExactOnConstantCruise) {
  const Scene s = generate(cruise_east(3.7));
  const Trajectory lin = eval::linear_baseline(s.target());
  for (int i = 0; i < kHorizon; ++i) EXPECT_NEAR(norm(lin[i] - s.future[i]), 0.0, 1e-9);
}

TEST(Synthgen, RejectsInvalidTemplates) {
  auto t = cruise_east(25.0);
  EXPECT_THROW(validate(t), Error);
  ScenarioTemplate f;
  f.kind = TemplateKind::kLeadFollow;
  f.params.gap = 3.0;
  EXPECT_THROW(generate(f), Error);
  ScenarioTemplate r;
  r.kind = TemplateKind::kRedLightStop;
  r.params.speed = 10.0;
  r.params.stop_distance = 8.0;
  EXPECT_THROW(generate(r), Error);
  EXPECT_THROW(generate_split(-1, 0, 1), Error);
}

TEST(Synthgen, TemplateNamesRoundTrip) {
  for (auto k : kAllTemplates) EXPECT_EQ(template_kind_from_string(to_string(k)), k);
  EXPECT_THROW(template_kind_from_string("roundabout"), Error);
}

}  // namespace
}  // namespace topdown::synth
