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

#include <cmath>

#include "doctest.h"
#include "gesturedet/layers.hpp"
#include "gesturedet/rng.hpp"

using namespace gesturedet;

namespace {

Tensor<double> RandomTensor(int n, int h, int w, int c, Rng& rng) {
  Tensor<double> t(n, h, w, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.Uniform(-1.0, 1.0);
  return t;
}

RowMatrix<double> RandomMatrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  RowMatrix<double> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-1.0, 1.0);
  return m;
}

Vector<double> RandomVector(Eigen::Index n, Rng& rng) {
  Vector<double> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.Uniform(-1.0, 1.0);
  return v;
}

ConstMatrixRef<double> CRef(const RowMatrix<double>& m) { return {m.data(), m.rows(), m.cols()}; }
ConstVectorRef<double> CRef(const Vector<double>& v) { return {v.data(), v.size()}; }

// Direct evaluation of a zero-padded cross-correlation with the padding rule
// out = ceil(in / s), total pad = max((out - 1) s + k - in, 0), floor half before.
double NaiveConvAt(const Tensor<double>& x, const RowMatrix<double>& w, const Vector<double>& b, int k, int s, int n,
                   int oy, int ox, int co, bool depthwise) {
  auto before = [&](int in) {
    const int out = (in + s - 1) / s;
    return std::max((out - 1) * s + k - in, 0) / 2;
  };
  double acc = b[co];
  for (int ky = 0; ky < k; ++ky) {
    for (int kx = 0; kx < k; ++kx) {
      const int iy = oy * s + ky - before(x.h());
      const int ix = ox * s + kx - before(x.w());
      if (iy < 0 || ix < 0 || iy >= x.h() || ix >= x.w()) continue;
      if (depthwise) {
        acc += x(n, iy, ix, co) * w(ky * k + kx, co);
      } else {
        for (int ci = 0; ci < x.c(); ++ci) acc += x(n, iy, ix, ci) * w((ky * k + kx) * x.c() + ci, co);
      }
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("same padding") {
  CHECK(SamePadding(8, 3, 1).out == 8);
  CHECK(SamePadding(8, 3, 1).before == 1);
  CHECK(SamePadding(8, 3, 2).out == 4);
  CHECK(SamePadding(8, 3, 2).before == 0);
  CHECK(SamePadding(7, 3, 2).out == 4);
  CHECK(SamePadding(7, 3, 2).before == 1);
  CHECK(SamePadding(5, 1, 1).before == 0);
  CHECK(SamePadding(240, 3, 2).out == 120);
  CHECK(SamePadding(15, 3, 2).out == 8);
}

TEST_CASE("convolution matches direct evaluation") {
  Rng rng(1);
  for (int k : {1, 3}) {
    for (int s : {1, 2}) {
      for (int h : {5, 6}) {
        const Tensor<double> x = RandomTensor(2, h, 7, 3, rng);
        const RowMatrix<double> w = RandomMatrix(k * k * 3, 4, rng);
        const Vector<double> b = RandomVector(4, rng);
        const Tensor<double> y = Conv2d(x, CRef(w), CRef(b), k, s);
        REQUIRE(y.h() == (h + s - 1) / s);
        REQUIRE(y.w() == (7 + s - 1) / s);
        for (int n = 0; n < 2; ++n)
          for (int oy = 0; oy < y.h(); ++oy)
            for (int ox = 0; ox < y.w(); ++ox)
              for (int co = 0; co < 4; ++co)
                CHECK(y(n, oy, ox, co) == doctest::Approx(NaiveConvAt(x, w, b, k, s, n, oy, ox, co, false)));
      }
    }
  }
}

TEST_CASE("depthwise convolution matches direct evaluation") {
  Rng rng(2);
  for (int s : {1, 2}) {
    const Tensor<double> x = RandomTensor(2, 7, 6, 5, rng);
    const RowMatrix<double> w = RandomMatrix(9, 5, rng);
    const Vector<double> b = RandomVector(5, rng);
    const Tensor<double> y = DepthwiseConv2d(x, CRef(w), CRef(b), 3, s);
    for (int n = 0; n < 2; ++n)
      for (int oy = 0; oy < y.h(); ++oy)
        for (int ox = 0; ox < y.w(); ++ox)
          for (int c = 0; c < 5; ++c)
            CHECK(y(n, oy, ox, c) == doctest::Approx(NaiveConvAt(x, w, b, 3, s, n, oy, ox, c, true)));
  }
}

TEST_CASE("hand-evaluated kernels") {
  Tensor<double> one(1, 1, 1, 1);
  one(0, 0, 0, 0) = 2.0;
  const RowMatrix<double> w3 = RowMatrix<double>::Constant(1, 1, 3.0);
  const Vector<double> b0 = Vector<double>::Zero(1);
  CHECK(Conv2d(one, CRef(w3), CRef(b0), 1, 1)(0, 0, 0, 0) == 6.0);

  Tensor<double> ones(1, 3, 3, 1);
  ones.values().setOnes();
  const RowMatrix<double> k = RowMatrix<double>::Ones(9, 1);
  const Tensor<double> y = DepthwiseConv2d(ones, CRef(k), CRef(b0), 3, 1);
  CHECK(y(0, 1, 1, 0) == 9.0);
  CHECK(y(0, 0, 0, 0) == 4.0);
  CHECK(y(0, 2, 2, 0) == 4.0);
  CHECK(y(0, 0, 1, 0) == 6.0);
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(3);
  const Tensor<double> x = RandomTensor(1, 4, 4, 3, rng);
  const RowMatrix<double> w = RandomMatrix(9 * 2, 4, rng);
  const Vector<double> b = RandomVector(4, rng);
  CHECK_THROWS_AS(Conv2d(x, CRef(w), CRef(b), 3, 1), Error);
  CHECK_THROWS_AS(DepthwiseConv2d(x, CRef(w), CRef(b), 3, 1), Error);
}

TEST_CASE("relu and its gradient") {
  Tensor<double> x(1, 1, 2, 2);
  x.values() << -1.0, 0.0, 2.0, -3.0;
  const Tensor<double> y = Relu(x);
  CHECK(y.values()[0] == 0.0);
  CHECK(y.values()[2] == 2.0);
  Tensor<double> dy(1, 1, 2, 2);
  dy.values().setConstant(5.0);
  const Tensor<double> dx = ReluBackward(y, dy);
  CHECK(dx.values()[0] == 0.0);
  CHECK(dx.values()[1] == 0.0);
  CHECK(dx.values()[2] == 5.0);
}

// Objective L = sum(y * r) for a fixed random r, so dL/dy = r.
TEST_CASE("layer gradients match central differences") {
  Rng rng(4);
  const double h = 1e-5;
  for (bool depthwise : {false, true}) {
    for (int s : {1, 2}) {
      const int k = 3;
      const int cin = 3, cout = depthwise ? 3 : 4;
      Tensor<double> x = RandomTensor(2, 5, 6, cin, rng);
      RowMatrix<double> w = RandomMatrix(depthwise ? k * k : k * k * cin, cout, rng);
      Vector<double> b = RandomVector(cout, rng);
      auto forward = [&]() {
        return depthwise ? DepthwiseConv2d(x, CRef(w), CRef(b), k, s) : Conv2d(x, CRef(w), CRef(b), k, s);
      };
      const Tensor<double> y0 = forward();
      Tensor<double> r = RandomTensor(y0.n(), y0.h(), y0.w(), y0.c(), rng);
      auto objective = [&]() { return forward().values().dot(r.values()); };

      Tensor<double> dx;
      RowMatrix<double> dw = RowMatrix<double>::Zero(w.rows(), w.cols());
      Vector<double> db = Vector<double>::Zero(b.size());
      MatrixRef<double> dw_ref(dw.data(), dw.rows(), dw.cols());
      VectorRef<double> db_ref(db.data(), db.size());
      if (depthwise) {
        DepthwiseConv2dBackward(x, r, CRef(w), k, s, &dx, dw_ref, db_ref);
      } else {
        Conv2dBackward(x, r, CRef(w), k, s, &dx, dw_ref, db_ref);
      }

      auto numeric = [&](double& v) {
        const double saved = v;
        v = saved + h;
        const double up = objective();
        v = saved - h;
        const double down = objective();
        v = saved;
        return (up - down) / (2 * h);
      };
      for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(dx.data()[i] == doctest::Approx(numeric(x.data()[i])).epsilon(1e-6));
      for (Eigen::Index i = 0; i < w.size(); ++i) CHECK(dw.data()[i] == doctest::Approx(numeric(w.data()[i])).epsilon(1e-6));
      for (Eigen::Index i = 0; i < b.size(); ++i) CHECK(db[i] == doctest::Approx(numeric(b[i])).epsilon(1e-6));
    }
  }
}

TEST_CASE("pointwise gradient path") {
  Rng rng(5);
  const Tensor<double> x = RandomTensor(2, 3, 3, 4, rng);
  const RowMatrix<double> w = RandomMatrix(4, 6, rng);
  const Vector<double> b = RandomVector(6, rng);
  const Tensor<double> y = Conv2d(x, CRef(w), CRef(b), 1, 1);
  const Tensor<double> r = RandomTensor(2, 3, 3, 6, rng);
  Tensor<double> dx;
  RowMatrix<double> dw = RowMatrix<double>::Zero(4, 6);
  Vector<double> db = Vector<double>::Zero(6);
  Conv2dBackward(x, r, CRef(w), 1, 1, &dx, MatrixRef<double>(dw.data(), 4, 6), VectorRef<double>(db.data(), 6));
  const RowMatrix<double> expected_dw = x.matrix().transpose() * r.matrix();
  CHECK((dw - expected_dw).cwiseAbs().maxCoeff() < 1e-12);
  const RowMatrix<double> expected_dx = r.matrix() * w.transpose();
  CHECK((dx.matrix() - expected_dx).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(y.h() == 3);
}
