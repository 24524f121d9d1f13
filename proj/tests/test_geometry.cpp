// Copyright 2026 The gesturedet Authors. All Rights Reserved.
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

#include <algorithm>
#include <cmath>
#include <tuple>

#include "doctest.h"
#include "gesturedet/error.hpp"
#include "gesturedet/geometry.hpp"
#include "gesturedet/rng.hpp"
#include "support/oracles.hpp"

using namespace gesturedet;
using gesturedet::testing::LiteralMatch;
using gesturedet::testing::RandomBox;
using gesturedet::testing::RasterIou;

TEST_CASE("iou of identical and disjoint boxes") {
  const BBox a{0.5, 0.5, 0.2, 0.2};
  CHECK(Iou(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Iou({0.2, 0.2, 0.1, 0.1}, {0.8, 0.8, 0.1, 0.1}) == 0.0);
}

TEST_CASE("iou of half-overlapping squares is one third") {
  const BBox a = BBox::FromCorners(0.0, 0.0, 0.25, 0.25);
  const BBox b = BBox::FromCorners(0.125, 0.0, 0.375, 0.25);
  const double raster = RasterIou(a, b);
  CHECK(std::abs(raster - 1.0 / 3.0) < 2e-3);
  CHECK(Iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou agrees with a raster on grid-aligned boxes") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const BBox a = gesturedet::testing::RandomGridBox(rng, 128);
    BBox b = gesturedet::testing::RandomGridBox(rng, 128);
    if (i % 2) b = BBox::FromCorners(a.left(), a.top(), std::min(1.0, a.right() + 3.0 / 128), a.bottom());
    CHECK(std::abs(Iou(a, b) - RasterIou(a, b, 128)) < 1e-9);
  }
}

TEST_CASE("touching boxes have zero iou") {
  CHECK(Iou(BBox::FromCorners(0.0, 0.0, 0.5, 0.5), BBox::FromCorners(0.5, 0.0, 1.0, 0.5)) == 0.0);
}

TEST_CASE("iou is symmetric and bounded") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = RandomBox(rng);
    const BBox b = RandomBox(rng);
    const double ab = Iou(a, b);
    CHECK(ab == Iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(Iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("box validity") {
  CHECK(IsValidBox({0.5, 0.5, 1.0, 1.0}));
  CHECK(IsValidBox({0.1, 0.1, 0.2, 0.2 + 1e-7}));
  CHECK_FALSE(IsValidBox({0.5, 0.5, 0.0, 0.2}));
  CHECK_FALSE(IsValidBox({0.05, 0.5, 0.2, 0.2}));
  CHECK_THROWS_AS(ValidateBox({0.5, 0.5, -0.1, 0.1}), Error);
}

TEST_CASE("single centered prior") {
  AnchorConfig config;
  config.maps.push_back({1, 1, {{0.5, 1.0}}});
  const auto anchors = GenerateAnchors(config);
  REQUIRE(anchors.size() == 1);
  CHECK(anchors[0].box == BBox{0.5, 0.5, 0.5, 0.5});
}

TEST_CASE("anchor count and ordering") {
  AnchorConfig config;
  const std::vector<PriorShape> priors = {{0.2, 1.0}, {0.3, 0.5}, {0.3, 2.0}};
  config.maps.push_back({3, 4, priors});
  config.maps.push_back({2, 2, priors});
  const auto anchors = GenerateAnchors(config);
  CHECK(anchors.size() == 48);
  CHECK(config.num_anchors() == 48);

  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const auto& p = anchors[i - 1];
    const auto& q = anchors[i];
    CHECK(std::tie(p.map, p.row, p.col, p.prior) < std::tie(q.map, q.row, q.col, q.prior));
  }
  const auto& a = anchors[(1 * 4 + 2) * 3 + 2];  // map 0, row 1, col 2, prior 2
  CHECK(a.row == 1);
  CHECK(a.col == 2);
  CHECK(a.prior == 2);
  CHECK(a.box.cx == doctest::Approx(2.5 / 4));
  CHECK(a.box.cy == doctest::Approx(1.5 / 3));
  CHECK(a.box.w == doctest::Approx(0.3 * std::sqrt(2.0)));
  CHECK(a.box.h == doctest::Approx(0.3 / std::sqrt(2.0)));
}

TEST_CASE("anchor generation is deterministic and matches the count formula") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    AnchorConfig config;
    int expected = 0;
    const int maps = 1 + static_cast<int>(rng.Below(3));
    for (int m = 0; m < maps; ++m) {
      FeatureMapSpec spec{1 + static_cast<int>(rng.Below(6)), 1 + static_cast<int>(rng.Below(6)), {}};
      const int priors = 1 + static_cast<int>(rng.Below(4));
      for (int p = 0; p < priors; ++p) spec.priors.push_back({rng.Uniform(0.05, 1.0), rng.Uniform(0.3, 3.0)});
      expected += spec.rows * spec.cols * priors;
      config.maps.push_back(spec);
    }
    const auto first = GenerateAnchors(config);
    const auto second = GenerateAnchors(config);
    REQUIRE(first.size() == static_cast<std::size_t>(expected));
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].box == second[i].box);
  }
}

TEST_CASE("default anchor config") {
  const AnchorConfig config = AnchorConfig::Default();
  CHECK(config.maps.size() == 2);
  CHECK(config.maps[0].cols == 10);
  CHECK(config.maps[0].rows == 8);
  CHECK(config.maps[1].cols == 5);
  CHECK(config.maps[1].rows == 4);
  CHECK(config.num_anchors() == (80 + 20) * 6);
  CHECK(config.variances.center == 0.1);
  CHECK(config.variances.size == 0.2);
}

TEST_CASE("invalid anchor configs are rejected") {
  AnchorConfig config;
  CHECK_THROWS_AS(GenerateAnchors(config), Error);
  config.maps.push_back({2, 2, {{1.5, 1.0}}});
  CHECK_THROWS_AS(GenerateAnchors(config), Error);
  config.maps[0].priors = {{0.5, 0.0}};
  CHECK_THROWS_AS(GenerateAnchors(config), Error);
  config.maps[0].priors = {{0.5, 1.0}};
  CHECK_NOTHROW(GenerateAnchors(config));
}

TEST_CASE("encode of the anchor itself is zero") {
  const BBox a{0.4, 0.6, 0.3, 0.2};
  const BoxOffsets t = Encode(a, a);
  CHECK(t.t_cx == 0.0);
  CHECK(t.t_cy == 0.0);
  CHECK(t.t_w == 0.0);
  CHECK(t.t_h == 0.0);
}

TEST_CASE("encode matches the hand-evaluated formula") {
  const BBox anchor{0.5, 0.5, 0.2, 0.2};
  const BBox box{0.6, 0.5, 0.4, 0.2};
  const BoxOffsets t = Encode(box, anchor, {0.1, 0.2});
  CHECK(t.t_cx == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(t.t_cy == 0.0);
  CHECK(t.t_w == doctest::Approx(std::log(2.0) / 0.2).epsilon(1e-12));
  CHECK(t.t_h == doctest::Approx(0.0));
}

TEST_CASE("decode inverts encode") {
  Rng rng(99);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const BBox b = RandomBox(rng, 0.01, 0.9);
    const BBox a = RandomBox(rng, 0.05, 0.9);
    const BBox r = Decode(Encode(b, a), a);
    worst = std::max({worst, std::abs(r.cx - b.cx), std::abs(r.cy - b.cy), std::abs(r.w - b.w), std::abs(r.h - b.h)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("encode rejects degenerate boxes") {
  CHECK_THROWS_AS(Encode({0.5, 0.5, 0.0, 0.1}, {0.5, 0.5, 0.2, 0.2}), Error);
  CHECK_THROWS_AS(Encode({0.5, 0.5, 0.1, 0.1}, {0.5, 0.5, 0.0, 0.2}), Error);
  CHECK_THROWS_AS(Decode({0.0, 0.0, 1e6, 0.0}, {0.5, 0.5, 0.2, 0.2}), Error);
}

TEST_CASE("matching picks the identical anchor") {
  const BBox gt{0.3, 0.3, 0.2, 0.2};
  const std::vector<Anchor> anchors = {{gt, 0, 0, 0, 0}, {{0.8, 0.8, 0.1, 0.1}, 0, 0, 0, 1}};
  const auto m = MatchAnchors(gt, anchors, 0.5);
  CHECK(m[0] == 1);
  CHECK(m[1] == 0);
}

TEST_CASE("matching forces the best anchor below threshold") {
  const BBox gt{0.5, 0.5, 0.1, 0.1};
  const std::vector<Anchor> anchors = {{{0.5, 0.5, 0.4, 0.4}, 0, 0, 0, 0},
                                       {{0.5, 0.5, 0.3, 0.3}, 0, 0, 0, 1},
                                       {{0.1, 0.1, 0.1, 0.1}, 0, 0, 0, 2}};
  const auto m = MatchAnchors(gt, anchors, 0.5);
  CHECK(m == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("matching ties go to the lowest index") {
  const BBox gt{0.5, 0.5, 0.1, 0.1};
  const std::vector<Anchor> anchors = {{{0.1, 0.1, 0.1, 0.1}, 0, 0, 0, 0},
                                       {{0.5, 0.5, 0.3, 0.3}, 0, 0, 0, 1},
                                       {{0.5, 0.5, 0.3, 0.3}, 0, 0, 0, 2}};
  CHECK(MatchAnchors(gt, anchors, 0.9) == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("matching equals the literal rule on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Anchor> anchors;
    const int n = 1 + static_cast<int>(rng.Below(20));
    for (int i = 0; i < n; ++i) anchors.push_back({RandomBox(rng, 0.05, 0.5), 0, 0, i, 0});
    // Duplicates exercise tie breaking.
    if (n > 2 && rng.Bernoulli(0.3)) anchors[1].box = anchors[2].box;
    const BBox gt = RandomBox(rng, 0.05, 0.5);
    const double threshold = rng.Uniform(0.05, 0.95);
    CHECK(MatchAnchors(gt, anchors, threshold) == LiteralMatch(gt, anchors, threshold));
  }
}

TEST_CASE("raising the threshold never adds positives") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Anchor> anchors;
    for (int i = 0; i < 20; ++i) anchors.push_back({RandomBox(rng, 0.05, 0.5), 0, 0, i, 0});
    const BBox gt = RandomBox(rng, 0.05, 0.5);
    const auto loose = MatchAnchors(gt, anchors, 0.2);
    const auto tight = MatchAnchors(gt, anchors, 0.6);
    int positives = 0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      CHECK(tight[i] <= loose[i]);
      positives += tight[i];
    }
    CHECK(positives >= 1);
  }
}

TEST_CASE("pixel rect rounds edges") {
  const PixelRect r = ToPixelRect({0.5, 0.5, 0.25, 0.5}, 64, 48);
  CHECK(r.x0 == 24);
  CHECK(r.x1 == 40);
  CHECK(r.y0 == 12);
  CHECK(r.y1 == 36);
}
