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

#include <fstream>

#include "golden_cases.hpp"
#include "test_util.hpp"
#include "topdown/dataset.hpp"
#include "topdown/error.hpp"
#include "topdown/synthgen.hpp"

namespace topdown {
namespace {

using testing::simple_scene;
using testing::temp_path;

std::string error_of(const Scene& s) {
  try {
    validate(s);
  } catch (const Error& e) {
    EXPECT_EQ(e.module(), "scene_model");
    return e.what();
  }
  return "";
}

TEST(SceneValidate, AcceptsSimpleScene) { EXPECT_NO_THROW(validate(simple_scene())); }

TEST(SceneValidate, RejectsWrongFrameCount) {
  Scene s = simple_scene();
  s.frames.resize(4);
  EXPECT_NE(error_of(s).find("expected 6 frames"), std::string::npos);
}

TEST(SceneValidate, NamesFrameMissingTheTarget) {
  Scene s = simple_scene();
  s.frames[3].entities.erase(s.frames[3].entities.begin());
  EXPECT_NE(error_of(s).find("frame 3"), std::string::npos);
}

TEST(SceneValidate, RejectsIrregularTimestamps) {
  Scene s = simple_scene();
  s.frames[2].timestamp += 1e-6;
  EXPECT_NE(error_of(s).find("0.5 s"), std::string::npos);
}

TEST(SceneValidate, ToleratesTinyTimestampJitter) {
  Scene s = simple_scene();
  s.frames[2].timestamp += 1e-10;
  EXPECT_NO_THROW(validate(s));
}

TEST(SceneValidate, RejectsDanglingLightReference) {
  Scene s = simple_scene();
  s.frames[0].lights[0].connection_id = 99;
  EXPECT_NE(error_of(s).find("connection_id"), std::string::npos);
}

TEST(SceneValidate, RejectsBadEntityFields) {
  Scene s = simple_scene();
  s.frames[1].entities[1].extent.width = 0.0;
  EXPECT_NE(error_of(s).find("extent"), std::string::npos);
  s = simple_scene();
  s.frames[1].entities[1].cov_norms[2] = -0.1;
  EXPECT_NE(error_of(s).find("cov_norms"), std::string::npos);
  s = simple_scene();
  s.frames[1].entities[1].velocity.x = std::nan("");
  EXPECT_NE(error_of(s).find("velocity"), std::string::npos);
}

TEST(SceneValidate, RejectsSelfIntersectingPolygon) {
  Scene s = simple_scene();
  s.road[1].geometry = {{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  EXPECT_NE(error_of(s).find("self-intersecting"), std::string::npos);
}

TEST(SceneValidate, RejectsShortGeometry) {
  Scene s = simple_scene();
  s.road[0].geometry.resize(1);
  EXPECT_NE(error_of(s).find("at least 2 points"), std::string::npos);
}

TEST(SimplePolygon, DetectsBowtie) {
  EXPECT_TRUE(is_simple_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  EXPECT_FALSE(is_simple_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
}

TEST(Dataset, EmptyListWritesEmptyFile) {
  const auto p = temp_path("empty.jsonl");
  save_dataset({}, p);
  EXPECT_EQ(std::filesystem::file_size(p), 0u);
  EXPECT_TRUE(load_dataset(p).empty());
}

TEST(Dataset, SingleSceneRoundTripsBitExactly) {
  Scene s = simple_scene();
  s.frames[2].entities[0].velocity = {0.1 + 0.2, 1.0 / 3.0};
  s.future[4] = {std::nextafter(10.0, 11.0), -1e-300};
  const auto p = temp_path("one.jsonl");
  save_dataset({s}, p);
  const auto back = load_dataset(p);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], s);
  std::ifstream in(p);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1);
}

TEST(Dataset, HundredScenesKeepOrder) {
  const auto split = synth::generate_split(100, 0, 5);
  const auto p = temp_path("hundred.jsonl");
  save_dataset(split.train, p);
  const auto back = load_dataset(p);
  ASSERT_EQ(back.size(), 100u);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], split.train[i]) << i;
}

TEST(Dataset, ParseErrorsCarryLineNumbers) {
  const auto p = temp_path("bad.jsonl");
  save_dataset({simple_scene()}, p);
  {
    std::ofstream out(p, std::ios::app);
    out << "{not json\n";
  }
  try {
    load_dataset(p);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(Dataset, FourFrameRecordIsRejected) {
  auto j = scene_to_json(simple_scene());
  j["frames"].erase(0);
  j["frames"].erase(0);
  const auto p = temp_path("four.jsonl");
  {
    std::ofstream out(p);
    out << j.dump() << "\n";
  }
  try {
    load_dataset(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("expected 6 frames"), std::string::npos) << e.what();
  }
}

TEST(Dataset, MissingTargetIsRejectedWithFrameIndex) {
  auto j = scene_to_json(simple_scene());
  j["frames"][3]["entities"].erase(0);
  const auto p = temp_path("notarget.jsonl");
  {
    std::ofstream out(p);
    out << j.dump() << "\n";
  }
  try {
    load_dataset(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("frame 3"), std::string::npos) << e.what();
  }
}

TEST(Dataset, RejectsUnknownVersion) {
  auto j = scene_to_json(simple_scene());
  j["v"] = 2;
  EXPECT_THROW(scene_from_json(j), Error);
}

TEST(Dataset, GoldenFileMatches) {
  const auto p = temp_path("golden_scene.jsonl");
  testing::write_golden_dataset(p);
  testing::expect_matches_golden(p, "scene.jsonl");
  const auto golden = load_dataset(testing::golden_dir() / "scene.jsonl");
  ASSERT_EQ(golden.size(), 1u);
  EXPECT_EQ(golden[0], synth::generate(testing::golden_template(true)));
}

}  // namespace
}  // namespace topdown
