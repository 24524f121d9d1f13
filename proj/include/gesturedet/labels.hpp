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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace gesturedet {

enum class GestureClass { kThumbsPress = 0, kThumbsUp = 1, kThumbsDown = 2, kPeace = 3 };
enum class Hand { kLeft = 0, kRight = 1 };

inline constexpr int kNumGestures = 4;
inline constexpr int kNumHands = 2;
// None plus every (gesture, hand) pair.
inline constexpr int kNumClasses = 1 + kNumGestures * kNumHands;

inline constexpr std::array<GestureClass, kNumGestures> kAllGestures = {
    GestureClass::kThumbsPress, GestureClass::kThumbsUp, GestureClass::kThumbsDown,
    GestureClass::kPeace};
inline constexpr std::array<Hand, kNumHands> kAllHands = {Hand::kLeft, Hand::kRight};

std::string_view GestureName(GestureClass g);
std::string_view HandName(Hand h);
GestureClass ParseGesture(std::string_view name);
Hand ParseHand(std::string_view name);

/// Either None or a (gesture, hand) pair. The logits index is 0 for None and
/// 1 + 2 * gesture + hand otherwise.
class ClassLabel {
 public:
  constexpr ClassLabel() = default;
  constexpr ClassLabel(GestureClass g, Hand h) : index_(1 + 2 * static_cast<int>(g) + static_cast<int>(h)) {}

  static ClassLabel None() { return ClassLabel(); }
  static ClassLabel FromIndex(int index);
  static ClassLabel Parse(std::string_view name);

  constexpr int index() const { return index_; }
  constexpr bool is_none() const { return index_ == 0; }
  GestureClass gesture() const;
  Hand hand() const;
  std::string name() const;

  friend constexpr bool operator==(ClassLabel a, ClassLabel b) { return a.index_ == b.index_; }
  friend constexpr auto operator<=>(ClassLabel a, ClassLabel b) { return a.index_ <=> b.index_; }

 private:
  int index_ = 0;
};

}  // namespace gesturedet
