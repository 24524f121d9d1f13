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

#include <cmath>
#include <string>
#include <vector>

#include "gesturedet/layers.hpp"
#include "gesturedet/model_config.hpp"
#include "gesturedet/rng.hpp"

namespace gesturedet {

/// Named parameter blobs in checkpoint order, each viewable as the matrix
/// its layer consumes.
template <typename Scalar>
class ParameterSet {
 public:
  struct Entry {
    ParamSpec spec;
    Vector<Scalar> values;
  };

  ParameterSet() = default;
  explicit ParameterSet(const std::vector<ParamSpec>& layout) {
    for (const auto& spec : layout) {
      entries_.push_back({spec, Vector<Scalar>::Zero(static_cast<Eigen::Index>(spec.count()))});
    }
  }
  static ParameterSet Zeros(const ModelConfig& config) { return ParameterSet(ParameterLayout(config)); }

  /// Weights ~ U(-sqrt(6 / (fan_in + fan_out)), +...), biases zero.
  static ParameterSet GlorotUniform(const ModelConfig& config, std::uint64_t seed) {
    ParameterSet params = Zeros(config);
    Rng rng(seed);
    for (auto& e : params.entries_) {
      if (e.spec.is_bias) continue;
      const double limit = std::sqrt(6.0 / static_cast<double>(e.spec.fan_in + e.spec.fan_out));
      for (Eigen::Index i = 0; i < e.values.size(); ++i) e.values[i] = static_cast<Scalar>(rng.Uniform(-limit, limit));
    }
    return params;
  }

  std::size_t size() const { return entries_.size(); }
  Entry& entry(std::size_t i) { return entries_.at(i); }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }

  MatrixRef<Scalar> matrix(std::size_t i) {
    auto& e = entries_.at(i);
    return MatrixRef<Scalar>(e.values.data(), e.spec.rows, e.spec.cols);
  }
  ConstMatrixRef<Scalar> matrix(std::size_t i) const {
    const auto& e = entries_.at(i);
    return ConstMatrixRef<Scalar>(e.values.data(), e.spec.rows, e.spec.cols);
  }
  VectorRef<Scalar> vector(std::size_t i) {
    auto& e = entries_.at(i);
    return VectorRef<Scalar>(e.values.data(), e.values.size());
  }
  ConstVectorRef<Scalar> vector(std::size_t i) const {
    const auto& e = entries_.at(i);
    return ConstVectorRef<Scalar>(e.values.data(), e.values.size());
  }

  std::int64_t count() const {
    std::int64_t n = 0;
    for (const auto& e : entries_) n += e.values.size();
    return n;
  }

  Vector<Scalar> Flatten() const {
    Vector<Scalar> flat(count());
    Eigen::Index pos = 0;
    for (const auto& e : entries_) {
      flat.segment(pos, e.values.size()) = e.values;
      pos += e.values.size();
    }
    return flat;
  }

  void Assign(const Vector<Scalar>& flat) {
    if (flat.size() != count()) throw Error(ErrorCode::kShape, "flat parameter vector has the wrong length");
    Eigen::Index pos = 0;
    for (auto& e : entries_) {
      e.values = flat.segment(pos, e.values.size());
      pos += e.values.size();
    }
  }

  void SetZero() {
    for (auto& e : entries_) e.values.setZero();
  }

  bool SameLayout(const ParameterSet& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].spec.name != other.entries_[i].spec.name ||
          entries_[i].spec.shape != other.entries_[i].spec.shape) {
        return false;
      }
    }
    return true;
  }

  template <typename Other>
  ParameterSet<Other> cast() const {
    ParameterSet<Other> out;
    for (const auto& e : entries_) out.entries().push_back({e.spec, e.values.template cast<Other>()});
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

/// Index of each layer's weight in the parameter list; the bias follows it.
struct ParamIndex {
  static constexpr std::size_t Stem() { return 0; }
  static constexpr std::size_t Depthwise(std::size_t block) { return 2 + 4 * block; }
  static constexpr std::size_t Pointwise(std::size_t block) { return 4 + 4 * block; }
  static constexpr std::size_t Head(std::size_t num_blocks, std::size_t tap) { return 2 + 4 * num_blocks + 2 * tap; }
};

}  // namespace gesturedet
