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

#include "test_util.hpp"
#include "topdown/dataset.hpp"
#include "topdown/predictions.hpp"
#include "topdown/synthgen.hpp"

// The example files under docs/examples are produced by the code below and
// compared byte-for-byte, so the format description cannot drift.

namespace topdown {
namespace {

const std::filesystem::path kDocs = std::filesystem::path(TOPDOWN_GOLDEN_DIR) / ".." / ".." / "docs" / "examples";

void expect_doc_matches(const std::filesystem::path& produced, const std::string& name) {
  const auto doc = kDocs / name;
  if (std::getenv("TOPDOWN_UPDATE_GOLDEN")) std::filesystem::copy_file(produced, doc, std::filesystem::copy_options::overwrite_existing);
  ASSERT_TRUE(std::filesystem::exists(doc)) << doc;
  EXPECT_EQ(testing::read_bytes(produced), testing::read_bytes(doc)) << name;
}

TEST(FormatDocs, SceneExample) {
  synth::ScenarioTemplate tmpl;
  tmpl.kind = synth::TemplateKind::kStraightCruise;
  tmpl.params.speed = 5.0;
  tmpl.params.heading = synth::Heading::kEast;
  tmpl.seed = 1;
  const auto p = testing::temp_path("doc_scene.jsonl");
  save_dataset({synth::generate(tmpl)}, p);
  expect_doc_matches(p, "scene.jsonl");
  EXPECT_EQ(load_dataset(kDocs / "scene.jsonl").front(), synth::generate(tmpl));
}

TEST(FormatDocs, PredictionExamples) {
  dist::MixtureTrajectories mix;
  mix.weights = {0.75, 0.25};
  for (int c = 0; c < 2; ++c) {
    dist::GaussianTrajectory g{};
    for (int t = 0; t < kHorizon; ++t) {
      g[t].mu = {5.0 * (t + 1), c == 0 ? 0.0 : 0.5 * (t + 1) * (t + 1)};
      g[t].log_sigma = {0.0, -0.5};
      g[t].rho = c == 0 ? 0.0 : 0.25;
    }
    mix.components.push_back(g);
  }
  predictions::TrajectorySet set;
  set.trajectories = {{{{5.5, -0.5}, {10.5, -0.5}, {15.5, -0.5}, {20.5, -0.5}, {25.5, -0.5}}}};
  set.weights = {1.0};
  set.scores = {-7.25};
  set.cells = {{{32, 37}, {32, 42}, {32, 47}, {32, 52}, {32, 57}}};
  const auto p = testing::temp_path("doc_predictions.jsonl");
  predictions::save(p, {{0, mix}, {0, set}});
  expect_doc_matches(p, "predictions.jsonl");
  EXPECT_EQ(predictions::load(kDocs / "predictions.jsonl").size(), 2u);
}

}  // namespace
}  // namespace topdown
