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

#include "gesturedet/labels.hpp"

#include "gesturedet/error.hpp"

namespace gesturedet {

std::string_view GestureName(GestureClass g) {
  switch (g) {
    case GestureClass::kThumbsPress: return "ThumbsPress";
    case GestureClass::kThumbsUp: return "ThumbsUp";
    case GestureClass::kThumbsDown: return "ThumbsDown";
    case GestureClass::kPeace: return "Peace";
  }
  return "?";
}

std::string_view HandName(Hand h) { return h == Hand::kLeft ? "Left" : "Right"; }

GestureClass ParseGesture(std::string_view name) {
  for (GestureClass g : kAllGestures) {
    if (GestureName(g) == name) return g;
  }
  throw Error(ErrorCode::kConfig, "unknown gesture '" + std::string(name) + "'");
}

Hand ParseHand(std::string_view name) {
  for (Hand h : kAllHands) {
    if (HandName(h) == name) return h;
  }
  throw Error(ErrorCode::kConfig, "unknown hand '" + std::string(name) + "'");
}

ClassLabel ClassLabel::FromIndex(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw Error(ErrorCode::kDomain, "class index out of range: " + std::to_string(index));
  }
  if (index == 0) return None();
  return ClassLabel(static_cast<GestureClass>((index - 1) / 2), static_cast<Hand>((index - 1) % 2));
}

ClassLabel ClassLabel::Parse(std::string_view name) {
  if (name == "None") return None();
  const auto sep = name.find('_');
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::kConfig, "malformed class label '" + std::string(name) + "'");
  }
  return ClassLabel(ParseGesture(name.substr(0, sep)), ParseHand(name.substr(sep + 1)));
}

GestureClass ClassLabel::gesture() const {
  if (is_none()) throw Error(ErrorCode::kDomain, "None label has no gesture");
  return static_cast<GestureClass>((index_ - 1) / 2);
}

Hand ClassLabel::hand() const {
  if (is_none()) throw Error(ErrorCode::kDomain, "None label has no hand");
  return static_cast<Hand>((index_ - 1) % 2);
}

std::string ClassLabel::name() const {
  if (is_none()) return "None";
  return std::string(GestureName(gesture())) + "_" + std::string(HandName(hand()));
}

}  // namespace gesturedet
