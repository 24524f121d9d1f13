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
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "doctest.h"
#include "gesturedet/dataset.hpp"
#include "gesturedet/error.hpp"
#include "gesturedet/rng.hpp"
#include "gesturedet/synth.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace gesturedet;
using gesturedet::testing::RandomBox;
using gesturedet::testing::TempDir;

namespace {

FrameRecord MakeRecord(FrameId id, const std::string& subject, int w, int h, Rng& rng) {
  FrameRecord r;
  r.meta.frame_id = id;
  r.meta.subject_id = subject;
  r.meta.scene_id = "scene-" + subject;
  r.meta.sequence_index = static_cast<int>(rng.Below(24));
  r.meta.timestamp_s = rng.Uniform(0.0, 30.0);
  r.meta.label = ClassLabel::FromIndex(1 + static_cast<int>(rng.Below(8)));
  r.meta.bbox = RandomBox(rng, 0.05, 0.6);
  r.image.resize(h, w);
  for (Eigen::Index i = 0; i < r.image.size(); ++i) r.image.data()[i] = static_cast<std::uint8_t>(rng.Below(256));
  return r;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("class table") {
  CHECK(kNumClasses == 9);
  std::set<std::string> names;
  for (int i = 0; i < kNumClasses; ++i) {
    const ClassLabel c = ClassLabel::FromIndex(i);
    CHECK(c.index() == i);
    CHECK(ClassLabel::Parse(c.name()) == c);
    names.insert(c.name());
  }
  CHECK(names.size() == 9);
  CHECK(ClassLabel::FromIndex(0).is_none());
  CHECK(ClassLabel(GestureClass::kPeace, Hand::kRight).index() == 8);
  CHECK_THROWS_AS(ClassLabel::FromIndex(9), Error);
  CHECK_THROWS_AS(ClassLabel::Parse("Wave_Left"), Error);
}

TEST_CASE("pgm roundtrip") {
  Rng rng(1);
  GrayImage img(7, 5);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(rng.Below(256));
  const std::string bytes = EncodePgm(img);
  CHECK(bytes.rfind("P5", 0) == 0);
  CHECK(DecodePgm(bytes) == img);
  CHECK_THROWS(DecodePgm("P2\n1 1\n255\n0"));
}

TEST_CASE("record line roundtrip") {
  FrameMeta m{42, "alice", "desk", 7, 12.3456789012345, ClassLabel(GestureClass::kThumbsDown, Hand::kLeft),
              {0.1 + 1e-13, 0.3, 0.2, 1.0 / 3.0}};
  const std::string line = EncodeRecordLine(m);
  CHECK(line.find("\"frame_id\"") < line.find("\"subject_id\""));
  CHECK(line.find("\"label\"") < line.find("\"bbox\""));
  CHECK(DecodeRecordLine(line) == m);
}

TEST_CASE("append then read back") {
  TempDir tmp;
  Rng rng(3);
  const FrameRecord rec = MakeRecord(0, "s0", 32, 24, rng);
  {
    DatasetStore store = DatasetStore::Create(tmp / "ds", 32, 24);
    store.Append(rec);
    const FrameRecord back = store.Load(0);
    CHECK(back.meta == rec.meta);
    CHECK(back.image == rec.image);
  }
  const DatasetStore ro = DatasetStore::OpenReadOnly(tmp / "ds");
  REQUIRE(ro.size() == 1);
  CHECK(ro.records()[0] == rec.meta);
  CHECK(ro.LoadImage(0) == rec.image);
  CHECK_FALSE(ro.writable());
}

TEST_CASE("append validation") {
  TempDir tmp;
  Rng rng(4);
  DatasetStore store = DatasetStore::Create(tmp / "ds", 320, 240);
  const FrameRecord small = MakeRecord(0, "s", 100, 100, rng);
  try {
    store.Append(small);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  const FrameRecord ok = MakeRecord(1, "s", 320, 240, rng);
  store.Append(ok);
  try {
    store.Append(ok);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateId);
  }
  FrameRecord none = MakeRecord(2, "s", 320, 240, rng);
  none.meta.label = ClassLabel::None();
  CHECK_THROWS_AS(store.Append(none), Error);
  FrameRecord bad_box = MakeRecord(3, "s", 320, 240, rng);
  bad_box.meta.bbox = {0.05, 0.5, 0.3, 0.3};
  CHECK_THROWS_AS(store.Append(bad_box), Error);
  CHECK(store.size() == 1);
}

TEST_CASE("thousand appends") {
  TempDir tmp;
  Rng rng(5);
  DatasetStore store = DatasetStore::Create(tmp / "ds", 4, 3);
  for (FrameId id = 0; id < 1000; ++id) store.Append(MakeRecord(id, "s" + std::to_string(id % 3), 4, 3, rng));
  CHECK(store.size() == 1000);
  CHECK(store.next_frame_id() == 1000);
  std::set<FrameId> ids;
  for (const auto& m : store.records()) ids.insert(m.frame_id);
  CHECK(ids.size() == 1000);
}

TEST_CASE("single writer lock") {
  TempDir tmp;
  DatasetStore writer = DatasetStore::Create(tmp / "ds", 4, 3);
  try {
    DatasetStore::OpenForWrite(tmp / "ds");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStoreLocked);
  }
  CHECK_NOTHROW(DatasetStore::OpenReadOnly(tmp / "ds"));
}

TEST_CASE("reopen for write continues the journal") {
  TempDir tmp;
  Rng rng(6);
  std::vector<FrameRecord> recs;
  for (FrameId id = 0; id < 6; ++id) recs.push_back(MakeRecord(id, "s", 8, 6, rng));
  {
    DatasetStore store = DatasetStore::Create(tmp / "ds", 8, 6);
    for (int i = 0; i < 3; ++i) store.Append(recs[i]);
  }
  {
    DatasetStore store = DatasetStore::OpenForWrite(tmp / "ds");
    CHECK(store.next_frame_id() == 3);
    for (int i = 3; i < 6; ++i) store.Append(recs[i]);
  }
  const DatasetStore ro = DatasetStore::OpenReadOnly(tmp / "ds");
  REQUIRE(ro.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(ro.records()[i] == recs[i].meta);
}

TEST_CASE("persistence is byte identical") {
  TempDir tmp;
  SynthOptions opt;
  opt.n_subjects = 2;
  opt.frames_per_sequence = 3;
  opt.width = 16;
  opt.height = 12;
  opt.seed = 9;
  Synthesize(tmp / "a", opt);
  Synthesize(tmp / "b", opt);
  CHECK(Slurp(tmp / "a" / "records.jsonl") == Slurp(tmp / "b" / "records.jsonl"));
  CHECK(Slurp(tmp / "a" / "manifest.json") == Slurp(tmp / "b" / "manifest.json"));
  CHECK(Slurp(tmp / "a" / "frames" / "17.pgm") == Slurp(tmp / "b" / "frames" / "17.pgm"));
  CHECK_THROWS_AS(Synthesize(tmp / "a", opt), Error);
}

TEST_CASE("split two equal subjects") {
  std::vector<FrameMeta> recs;
  for (FrameId id = 0; id < 100; ++id) {
    FrameMeta m;
    m.frame_id = id;
    m.subject_id = id < 50 ? "a" : "b";
    recs.push_back(m);
  }
  const SplitResult s = SplitBySubject(recs, 0.5, 1);
  CHECK(s.train_ids.size() == 50);
  CHECK(s.eval_ids.size() == 50);
  CHECK(s.train_subjects.size() == 1);
  CHECK(s.eval_subjects.size() == 1);
  CHECK(s.train_subjects != s.eval_subjects);
}

TEST_CASE("split properties") {
  Rng rng(7);
  std::vector<FrameMeta> recs;
  std::map<std::string, int> per_subject;
  for (FrameId id = 0; id < 2000; ++id) {
    FrameMeta m;
    m.frame_id = id;
    m.subject_id = "p" + std::to_string(rng.Below(9));
    ++per_subject[m.subject_id];
    recs.push_back(m);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SplitResult s = SplitBySubject(recs, 0.2, seed);
    CHECK(s.train_ids.size() + s.eval_ids.size() == recs.size());
    std::set<FrameId> all(s.train_ids.begin(), s.train_ids.end());
    all.insert(s.eval_ids.begin(), s.eval_ids.end());
    CHECK(all.size() == recs.size());
    std::set<std::string> train(s.train_subjects.begin(), s.train_subjects.end());
    for (const auto& e : s.eval_subjects) CHECK(train.count(e) == 0);
    CHECK_FALSE(s.eval_subjects.empty());
    CHECK_FALSE(s.train_subjects.empty());
    for (FrameId id : s.eval_ids) CHECK(train.count(recs[id].subject_id) == 0);

    const SplitResult again = SplitBySubject(recs, 0.2, seed);
    CHECK(again.eval_ids == s.eval_ids);
    CHECK(again.train_subjects == s.train_subjects);
    CHECK(SplitFromJson(SplitToJson(s)).eval_ids == s.eval_ids);
  }
}

TEST_CASE("split preconditions") {
  std::vector<FrameMeta> recs(10);
  for (FrameId id = 0; id < 10; ++id) {
    recs[id].frame_id = id;
    recs[id].subject_id = "only";
  }
  try {
    SplitBySubject(recs, 0.5, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCannotSplit);
  }
  recs[0].subject_id = "other";
  CHECK_THROWS_AS(SplitBySubject(recs, 0.0, 0), Error);
  CHECK_THROWS_AS(SplitBySubject(recs, 1.0, 0), Error);
}

TEST_CASE("stats of a black frame") {
  TempDir tmp;
  DatasetStore store = DatasetStore::Create(tmp / "ds", 32, 24);
  FrameRecord r;
  r.meta = {0, "s", "c", 0, 0.0, ClassLabel(GestureClass::kThumbsUp, Hand::kLeft), {0.5, 0.5, 0.25, 0.5}};
  r.image = GrayImage::Zero(24, 32);
  store.Append(r);
  const DatasetStats st = ComputeStats(store);
  CHECK(st.intensity_all[0] == 32 * 24);
  CHECK(std::count(st.intensity_all.begin() + 1, st.intensity_all.end(), 0) == 255);
  CHECK(st.intensity_in_box[0] == 8 * 12);
  CHECK(st.mean_intensity() == 0.0);
}

TEST_CASE("stats heatmap has one cell per distinct center") {
  TempDir tmp;
  DatasetStore store = DatasetStore::Create(tmp / "ds", 32, 24);
  FrameRecord r;
  r.image = GrayImage::Constant(24, 32, 9);
  r.meta = {0, "s", "c", 0, 0.0, ClassLabel(GestureClass::kPeace, Hand::kLeft), {0.25, 0.5, 0.2, 0.2}};
  store.Append(r);
  r.meta.frame_id = 1;
  r.meta.bbox.cx = 0.75;
  store.Append(r);
  const DatasetStats st = ComputeStats(store);
  CHECK(st.center_heatmap.sum() == 2);
  CHECK((st.center_heatmap.array() != 0).count() == 2);
  CHECK(st.center_heatmap(12, 8) == 1);
  CHECK(st.center_heatmap(12, 24) == 1);
}

TEST_CASE("stats match a naive recount") {
  TempDir tmp;
  Rng rng(10);
  const int w = 20, h = 15;
  DatasetStore store = DatasetStore::Create(tmp / "ds", w, h);
  std::vector<FrameRecord> recs;
  for (FrameId id = 0; id < 300; ++id) {
    recs.push_back(MakeRecord(id, "s" + std::to_string(id % 4), w, h, rng));
    store.Append(recs.back());
  }
  std::vector<FrameId> subset;
  for (FrameId id = 0; id < 300; id += 3) subset.push_back(id);
  const DatasetStats st = ComputeStats(store, subset);

  std::array<std::int64_t, kNumClasses> classes{};
  std::array<std::int64_t, 256> all{}, inbox{};
  std::array<std::int64_t, kWidthBins> widths{};
  std::map<std::pair<int, int>, std::int64_t> heat;
  for (FrameId id : subset) {
    const FrameRecord& r = recs[id];
    ++classes[r.meta.label.index()];
    const double wpx = r.meta.bbox.w * w;
    int bin = 0;
    while (bin + 1 < kWidthBins && wpx >= (bin + 1) * (static_cast<double>(w) / kWidthBins)) ++bin;
    ++widths[bin];
    int row = 0, col = 0;
    while (row + 1 < kHeatmapRows && r.meta.bbox.cy >= (row + 1) / 24.0) ++row;
    while (col + 1 < kHeatmapCols && r.meta.bbox.cx >= (col + 1) / 32.0) ++col;
    ++heat[{row, col}];
    const double x0 = std::round(r.meta.bbox.left() * w), x1 = std::round(r.meta.bbox.right() * w);
    const double y0 = std::round(r.meta.bbox.top() * h), y1 = std::round(r.meta.bbox.bottom() * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t v = r.image(y, x);
        ++all[v];
        if (x >= x0 && x < x1 && y >= y0 && y < y1) ++inbox[v];
      }
    }
  }
  CHECK(st.total_frames == static_cast<std::int64_t>(subset.size()));
  CHECK(st.class_counts == classes);
  CHECK(st.intensity_all == all);
  CHECK(st.intensity_in_box == inbox);
  CHECK(st.width_histogram == widths);
  for (int r = 0; r < kHeatmapRows; ++r) {
    for (int c = 0; c < kHeatmapCols; ++c) {
      const auto it = heat.find({r, c});
      CHECK(st.center_heatmap(r, c) == (it == heat.end() ? 0 : it->second));
    }
  }
  double sum = 0.0;
  for (double f : st.class_fractions) sum += f;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(st.class_fractions[0] == 0.0);
}

TEST_CASE("class fractions are computed from counts") {
  // Proportions of a large recorded corpus scaled down by 100. The fourth
  // gesture comes out at 28.7 percent.
  TempDir tmp;
  DatasetStore store = DatasetStore::Create(tmp / "ds", 4, 3);
  const std::array<int, 4> counts = {1132, 1207, 558, 1168};
  FrameRecord r;
  r.image = GrayImage::Zero(3, 4);
  r.meta.bbox = {0.5, 0.5, 0.5, 0.5};
  FrameId id = 0;
  for (int g = 0; g < 4; ++g) {
    for (int k = 0; k < counts[g]; ++k) {
      r.meta.frame_id = id++;
      r.meta.label = ClassLabel(kAllGestures[g], Hand::kLeft);
      store.Append(r);
    }
  }
  const DatasetStats st = ComputeStats(store);
  CHECK(st.total_frames == 4065);
  for (int g = 0; g < 4; ++g) {
    const int idx = ClassLabel(kAllGestures[g], Hand::kLeft).index();
    CHECK(st.class_counts[idx] == counts[g]);
    CHECK(st.class_fractions[idx] == static_cast<double>(counts[g]) / 4065.0);
  }
  CHECK(st.class_fractions[ClassLabel(GestureClass::kPeace, Hand::kLeft).index()] ==
        doctest::Approx(0.287).epsilon(0.002));
}

TEST_CASE("stats on an empty selection") {
  TempDir tmp;
  DatasetStore store = DatasetStore::Create(tmp / "ds", 4, 3);
  try {
    ComputeStats(store);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptySelection);
  }
}
