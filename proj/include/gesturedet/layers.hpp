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

#include <algorithm>

#include "gesturedet/tensor.hpp"

namespace gesturedet {

template <typename Scalar>
using ConstMatrixRef = Eigen::Map<const RowMatrix<Scalar>>;
template <typename Scalar>
using MatrixRef = Eigen::Map<RowMatrix<Scalar>>;
template <typename Scalar>
using ConstVectorRef = Eigen::Map<const Vector<Scalar>>;
template <typename Scalar>
using VectorRef = Eigen::Map<Vector<Scalar>>;

/// "Same" padding: out = ceil(in / stride), the extra row or column of zero
/// padding going after the input.
struct Padding {
  int out = 0;
  int before = 0;
};

inline Padding SamePadding(int in, int kernel, int stride) {
  const int out = (in + stride - 1) / stride;
  const int total = std::max((out - 1) * stride + kernel - in, 0);
  return {out, total / 2};
}

namespace detail {

/// Rows are output positions, columns (ky, kx, cin) in that order.
template <typename Scalar>
RowMatrix<Scalar> Im2Col(const Tensor<Scalar>& x, int kernel, int stride, const Padding& py, const Padding& px) {
  const int cin = x.c();
  RowMatrix<Scalar> cols = RowMatrix<Scalar>::Zero(static_cast<Eigen::Index>(x.n()) * py.out * px.out,
                                                   static_cast<Eigen::Index>(kernel) * kernel * cin);
  for (int n = 0; n < x.n(); ++n) {
    for (int oy = 0; oy < py.out; ++oy) {
      for (int ox = 0; ox < px.out; ++ox) {
        const Eigen::Index row = (static_cast<Eigen::Index>(n) * py.out + oy) * px.out + ox;
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - py.before + ky;
          if (iy < 0 || iy >= x.h()) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - px.before + kx;
            if (ix < 0 || ix >= x.w()) continue;
            cols.row(row).segment((ky * kernel + kx) * cin, cin) =
                Eigen::Map<const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>>(x.data() + x.offset(n, iy, ix, 0), cin);
          }
        }
      }
    }
  }
  return cols;
}

template <typename Scalar>
void Col2ImAdd(const RowMatrix<Scalar>& cols, int kernel, int stride, const Padding& py, const Padding& px,
               Tensor<Scalar>& dx) {
  const int cin = dx.c();
  for (int n = 0; n < dx.n(); ++n) {
    for (int oy = 0; oy < py.out; ++oy) {
      for (int ox = 0; ox < px.out; ++ox) {
        const Eigen::Index row = (static_cast<Eigen::Index>(n) * py.out + oy) * px.out + ox;
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - py.before + ky;
          if (iy < 0 || iy >= dx.h()) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - px.before + kx;
            if (ix < 0 || ix >= dx.w()) continue;
            Eigen::Map<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>>(dx.data() + dx.offset(n, iy, ix, 0), cin) +=
                cols.row(row).segment((ky * kernel + kx) * cin, cin);
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Cross-correlation with (kernel*kernel*cin) x cout weights laid out as
/// (ky, kx, cin) rows, zero "same" padding.
template <typename Scalar>
Tensor<Scalar> Conv2d(const Tensor<Scalar>& x, const ConstMatrixRef<Scalar>& weights,
                      const ConstVectorRef<Scalar>& bias, int kernel, int stride) {
  if (weights.rows() != static_cast<Eigen::Index>(kernel) * kernel * x.c() || bias.size() != weights.cols()) {
    throw Error(ErrorCode::kShape, "conv weights do not match input " + ShapeString(x.shape()));
  }
  const Padding py = SamePadding(x.h(), kernel, stride);
  const Padding px = SamePadding(x.w(), kernel, stride);
  Tensor<Scalar> y(x.n(), py.out, px.out, static_cast<int>(weights.cols()));
  auto out = y.matrix();
  if (kernel == 1 && stride == 1) {
    out.noalias() = x.matrix() * weights;
  } else {
    out.noalias() = detail::Im2Col(x, kernel, stride, py, px) * weights;
  }
  out.rowwise() += bias.transpose();
  return y;
}

/// Accumulates weight and bias gradients; writes the input gradient when dx
/// is non-null.
template <typename Scalar>
void Conv2dBackward(const Tensor<Scalar>& x, const Tensor<Scalar>& dy, const ConstMatrixRef<Scalar>& weights,
                    int kernel, int stride, Tensor<Scalar>* dx, MatrixRef<Scalar> dweights, VectorRef<Scalar> dbias) {
  const Padding py = SamePadding(x.h(), kernel, stride);
  const Padding px = SamePadding(x.w(), kernel, stride);
  if (dy.h() != py.out || dy.w() != px.out || dy.c() != weights.cols() || dy.n() != x.n()) {
    throw Error(ErrorCode::kShape, "conv output gradient has shape " + ShapeString(dy.shape()));
  }
  const auto g = dy.matrix();
  dbias += g.colwise().sum().transpose();
  if (kernel == 1 && stride == 1) {
    dweights.noalias() += x.matrix().transpose() * g;
    if (dx) {
      *dx = Tensor<Scalar>(x.n(), x.h(), x.w(), x.c());
      dx->matrix().noalias() = g * weights.transpose();
    }
    return;
  }
  const RowMatrix<Scalar> cols = detail::Im2Col(x, kernel, stride, py, px);
  dweights.noalias() += cols.transpose() * g;
  if (dx) {
    const RowMatrix<Scalar> dcols = g * weights.transpose();
    *dx = Tensor<Scalar>(x.n(), x.h(), x.w(), x.c());
    detail::Col2ImAdd(dcols, kernel, stride, py, px, *dx);
  }
}

/// Per-channel 3x3 (or kernel x kernel) cross-correlation; weights are
/// (kernel*kernel) x channels.
template <typename Scalar>
Tensor<Scalar> DepthwiseConv2d(const Tensor<Scalar>& x, const ConstMatrixRef<Scalar>& weights,
                               const ConstVectorRef<Scalar>& bias, int kernel, int stride) {
  if (weights.rows() != static_cast<Eigen::Index>(kernel) * kernel || weights.cols() != x.c() ||
      bias.size() != x.c()) {
    throw Error(ErrorCode::kShape, "depthwise weights do not match input " + ShapeString(x.shape()));
  }
  using RowVec = Eigen::Array<Scalar, 1, Eigen::Dynamic>;
  const int c = x.c();
  const Padding py = SamePadding(x.h(), kernel, stride);
  const Padding px = SamePadding(x.w(), kernel, stride);
  Tensor<Scalar> y(x.n(), py.out, px.out, c);
  const Eigen::Array<Scalar, 1, Eigen::Dynamic> b = bias.transpose().array();
  for (int n = 0; n < x.n(); ++n) {
    for (int oy = 0; oy < py.out; ++oy) {
      for (int ox = 0; ox < px.out; ++ox) {
        Eigen::Map<RowVec> acc(y.data() + y.offset(n, oy, ox, 0), c);
        acc = b;
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - py.before + ky;
          if (iy < 0 || iy >= x.h()) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - px.before + kx;
            if (ix < 0 || ix >= x.w()) continue;
            acc += Eigen::Map<const RowVec>(x.data() + x.offset(n, iy, ix, 0), c) *
                   weights.row(ky * kernel + kx).array();
          }
        }
      }
    }
  }
  return y;
}

template <typename Scalar>
void DepthwiseConv2dBackward(const Tensor<Scalar>& x, const Tensor<Scalar>& dy, const ConstMatrixRef<Scalar>& weights,
                             int kernel, int stride, Tensor<Scalar>* dx, MatrixRef<Scalar> dweights,
                             VectorRef<Scalar> dbias) {
  using RowVec = Eigen::Array<Scalar, 1, Eigen::Dynamic>;
  const int c = x.c();
  const Padding py = SamePadding(x.h(), kernel, stride);
  const Padding px = SamePadding(x.w(), kernel, stride);
  if (dy.h() != py.out || dy.w() != px.out || dy.c() != c || dy.n() != x.n()) {
    throw Error(ErrorCode::kShape, "depthwise output gradient has shape " + ShapeString(dy.shape()));
  }
  if (dx) *dx = Tensor<Scalar>(x.n(), x.h(), x.w(), c);
  dbias += dy.matrix().colwise().sum().transpose();
  for (int n = 0; n < x.n(); ++n) {
    for (int oy = 0; oy < py.out; ++oy) {
      for (int ox = 0; ox < px.out; ++ox) {
        const Eigen::Map<const RowVec> g(dy.data() + dy.offset(n, oy, ox, 0), c);
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - py.before + ky;
          if (iy < 0 || iy >= x.h()) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - px.before + kx;
            if (ix < 0 || ix >= x.w()) continue;
            const int k = ky * kernel + kx;
            dweights.row(k).array() += Eigen::Map<const RowVec>(x.data() + x.offset(n, iy, ix, 0), c) * g;
            if (dx) Eigen::Map<RowVec>(dx->data() + dx->offset(n, iy, ix, 0), c) += weights.row(k).array() * g;
          }
        }
      }
    }
  }
}

template <typename Scalar>
Tensor<Scalar> Relu(Tensor<Scalar> x) {
  x.values() = x.values().cwiseMax(Scalar(0));
  return x;
}

template <typename Scalar>
void ReluInPlace(Tensor<Scalar>& x) {
  x.values() = x.values().cwiseMax(Scalar(0));
}

/// Gradient through ReLU given its output; zero wherever the output is zero.
template <typename Scalar>
Tensor<Scalar> ReluBackward(const Tensor<Scalar>& y, Tensor<Scalar> dy) {
  dy.values() = (y.values().array() > Scalar(0)).select(dy.values(), Scalar(0));
  return dy;
}

}  // namespace gesturedet
