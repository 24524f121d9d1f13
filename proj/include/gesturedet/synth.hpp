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

#pragma once

#include <cstdint>
#include <filesystem>

#include "gesturedet/geometry.hpp"
#include "gesturedet/image.hpp"
#include "gesturedet/labels.hpp"
#include "gesturedet/rng.hpp"

namespace gesturedet {

/// Stand-in for a recorded subject: every subject runs the default 24-sequence
/// session and each frame shows a bright glyph filling the target box on a
/// noisy background. The glyph identifies the gesture; the left hand sees the
/// right-hand glyph mirrored.
struct SynthOptions {
  int n_subjects = 3;
  int frames_per_sequence = 40;
  int width = 64;
  int height = 48;
  double duration_s = 30.0;
  std::uint64_t seed = 0;
};

/// Per-subject rendering appearance.
struct SceneLook {
  double background = 60.0;
  double gradient = 20.0;
  double noise = 15.0;
  double glyph = 210.0;
  double glyph_noise = 10.0;

  static SceneLook Sample(Rng& rng);
};

/// 4x4 occupancy mask of a class glyph, row-major, true = bright.
bool GlyphCell(ClassLabel label, int row, int col);

GrayImage RenderGlyphFrame(int width, int height, ClassLabel label, const BBox& box, const SceneLook& look, Rng& rng);

/// Writes a new dataset directory. Fails if dir exists and is not empty.
void Synthesize(const std::filesystem::path& dir, const SynthOptions& options);

}  // namespace gesturedet
