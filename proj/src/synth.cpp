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

#include "gesturedet/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "gesturedet/dataset.hpp"
#include "gesturedet/error.hpp"
#include "gesturedet/trajectory.hpp"

namespace gesturedet {

namespace {

// Right-hand orientation; every glyph touches all four box edges.
constexpr std::array<std::array<const char*, 4>, kNumGestures> kGlyphs = {{
    {"1000", "1000", "1000", "1111"},  // ThumbsPress
    {"1100", "1100", "1111", "1111"},  // ThumbsUp
    {"1111", "1111", "1100", "1100"},  // ThumbsDown
    {"1010", "1010", "1111", "1111"},  // Peace
}};

std::uint8_t ToPixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

std::string Numbered(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

}  // namespace

SceneLook SceneLook::Sample(Rng& rng) {
  SceneLook look;
  look.background = rng.Uniform(30.0, 90.0);
  look.gradient = rng.Uniform(-25.0, 25.0);
  look.noise = rng.Uniform(8.0, 20.0);
  look.glyph = rng.Uniform(175.0, 235.0);
  look.glyph_noise = rng.Uniform(5.0, 15.0);
  return look;
}

bool GlyphCell(ClassLabel label, int row, int col) {
  const int c = label.hand() == Hand::kLeft ? 3 - col : col;
  return kGlyphs[static_cast<std::size_t>(label.gesture())][static_cast<std::size_t>(row)][c] == '1';
}

GrayImage RenderGlyphFrame(int width, int height, ClassLabel label, const BBox& box, const SceneLook& look, Rng& rng) {
  GrayImage img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img(y, x) = ToPixel(look.background + look.gradient * (static_cast<double>(x) / width - 0.5) +
                          rng.Uniform(-look.noise, look.noise));
    }
  }
  const PixelRect rect = ToPixelRect(box, width, height);
  const int rw = rect.x1 - rect.x0;
  const int rh = rect.y1 - rect.y0;
  for (int y = rect.y0; y < rect.y1; ++y) {
    const int row = std::min(3, (y - rect.y0) * 4 / rh);
    for (int x = rect.x0; x < rect.x1; ++x) {
      const int col = std::min(3, (x - rect.x0) * 4 / rw);
      if (GlyphCell(label, row, col)) img(y, x) = ToPixel(look.glyph + rng.Uniform(-look.glyph_noise, look.glyph_noise));
    }
  }
  return img;
}

void Synthesize(const std::filesystem::path& dir, const SynthOptions& options) {
  if (options.n_subjects < 1 || options.frames_per_sequence < 1) {
    throw Error(ErrorCode::kConfig, "synth needs at least one subject and one frame per sequence");
  }
  if (std::filesystem::exists(dir) && !std::filesystem::is_empty(dir)) {
    throw Error(ErrorCode::kStoreIo, dir.string() + " already exists and is not empty");
  }
  DatasetStore store = DatasetStore::Create(dir, options.width, options.height, "synthetic");
  Rng rng(options.seed);
  FrameId next_id = 0;
  for (int s = 0; s < options.n_subjects; ++s) {
    const SessionPlan plan = PlanDefaultSession(Numbered("subject", s), Numbered("scene", s), options.duration_s);
    const SceneLook look = SceneLook::Sample(rng);
    for (const SequenceSpec& seq : plan.sequences) {
      for (int k = 0; k < options.frames_per_sequence; ++k) {
        const double t = options.frames_per_sequence > 1
                             ? seq.trajectory.duration_s * k / (options.frames_per_sequence - 1)
                             : 0.0;
        FrameRecord record;
        record.meta = {next_id++, plan.subject_id, plan.scene_id, seq.sequence_index, t, seq.label(),
                       TargetAt(seq.trajectory, t)};
        record.image = RenderGlyphFrame(options.width, options.height, record.meta.label, record.meta.bbox, look, rng);
        store.Append(record);
      }
    }
  }
}

}  // namespace gesturedet
