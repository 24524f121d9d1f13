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
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "gesturedet/error.hpp"

namespace gesturedet {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense NHWC activation tensor.
template <typename Scalar>
class Tensor {
 public:
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

  Tensor() = default;
  Tensor(int n, int h, int w, int c) : shape_{n, h, w, c} {
    if (n < 0 || h < 0 || w < 0 || c < 0) throw Error(ErrorCode::kShape, "negative tensor dimension");
    data_ = Vector<Scalar>::Zero(static_cast<Eigen::Index>(n) * h * w * c);
  }

  int n() const { return shape_[0]; }
  int h() const { return shape_[1]; }
  int w() const { return shape_[2]; }
  int c() const { return shape_[3]; }
  const std::array<int, 4>& shape() const { return shape_; }
  Eigen::Index size() const { return data_.size(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  Vector<Scalar>& values() { return data_; }
  const Vector<Scalar>& values() const { return data_; }

  Eigen::Index offset(int n, int y, int x, int ch) const {
    return ((static_cast<Eigen::Index>(n) * shape_[1] + y) * shape_[2] + x) * shape_[3] + ch;
  }
  Scalar& operator()(int n, int y, int x, int ch) { return data_[offset(n, y, x, ch)]; }
  Scalar operator()(int n, int y, int x, int ch) const { return data_[offset(n, y, x, ch)]; }

  /// (n * h * w) x c view: one row per spatial position.
  MatrixMap matrix() { return MatrixMap(data_.data(), rows(), shape_[3]); }
  ConstMatrixMap matrix() const { return ConstMatrixMap(data_.data(), rows(), shape_[3]); }

  bool all_finite() const { return data_.allFinite(); }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(n(), h(), w(), c());
    out.values() = data_.template cast<Other>();
    return out;
  }

  friend bool operator==(const Tensor& a, const Tensor& b) { return a.shape_ == b.shape_ && a.data_ == b.data_; }

 private:
  Eigen::Index rows() const { return static_cast<Eigen::Index>(shape_[0]) * shape_[1] * shape_[2]; }

  std::array<int, 4> shape_{0, 0, 0, 0};
  Vector<Scalar> data_;
};

inline std::string ShapeString(const std::array<int, 4>& s) {
  return "(" + std::to_string(s[0]) + ", " + std::to_string(s[1]) + ", " + std::to_string(s[2]) + ", " +
         std::to_string(s[3]) + ")";
}

#ifndef NDEBUG
#define GESTUREDET_CHECK_FINITE(t, where)                                                  \
  do {                                                                                     \
    if (!(t).all_finite()) throw ::gesturedet::Error(::gesturedet::ErrorCode::kInternal,   \
                                                     std::string("non-finite values after ") + (where)); \
  } while (0)
#else
#define GESTUREDET_CHECK_FINITE(t, where) \
  do {                                    \
  } while (0)
#endif

}  // namespace gesturedet
