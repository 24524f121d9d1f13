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
#include <limits>

namespace gesturedet {

/// xorshift64* generator. The whole stream is defined by:
///
///   seeding:  z = seed + 0x9E3779B97F4A7C15
///             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///             state = z ^ (z >> 31), or 1 if that is zero
///   step:     x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
///             output = x * 0x2545F4914F6CDD1D   (mod 2^64)
///   uniform:  (output >> 11) * 2^-53, in [0, 1)
///
/// Helpers below are built only from Uniform() so streams are reproducible in
/// any language. Parallel workers seed with base_seed ^ worker_index.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    state_ = z ^ (z >> 31);
    if (state_ == 0) state_ = 1;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Integer in [0, n).
  std::uint64_t Below(std::uint64_t n) {
    const auto v = static_cast<std::uint64_t>(Uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }
  bool Bernoulli(double p) { return Uniform() < p; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates from the back: for i = n-1 .. 1, swap(i, Below(i + 1)).
template <typename Container>
void Shuffle(Container& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.Below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace gesturedet
