#pragma once

#include <cmath>
#include <numbers>

#include "rbd/common.hpp"

namespace rbd {

// Orthonormal type-II DCT matrix: row k, column n.
template <class Scalar>
Mat<Scalar> dct_matrix(int n) {
  if (n <= 0) throw ContractError("dct_matrix: size must be positive");
  Mat<Scalar> d(n, n);
  const double norm0 = std::sqrt(1.0 / n);
  const double norm = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double angle = std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n);
      d(k, i) = static_cast<Scalar>((k == 0 ? norm0 : norm) * std::cos(angle));
    }
  }
  return d;
}

// Low-frequency square mask over an HxW DCT coefficient grid:
// coefficient (u, v) is retained iff u < ceil(r*H) and v < ceil(r*W).
struct FrequencyMask {
  int h = 0;
  int w = 0;
  int keep_u = 0;
  int keep_v = 0;

  FrequencyMask() = default;
  FrequencyMask(int height, int width, double mask_ratio) : h(height), w(width) {
    if (mask_ratio <= 0.0 || mask_ratio > 1.0)
      throw ConfigError("FrequencyMask: mask_ratio must be in (0,1]");
    if (height <= 0 || width <= 0) throw ContractError("FrequencyMask: non-positive shape");
    keep_u = static_cast<int>(std::ceil(mask_ratio * height));
    keep_v = static_cast<int>(std::ceil(mask_ratio * width));
  }

  bool retained(int u, int v) const { return u < keep_u && v < keep_v; }
  int support_count() const { return keep_u * keep_v; }
};

// Precomputed 2-D orthonormal DCT for a fixed (H, W) grid.
template <class Scalar>
struct Dct2 {
  Mat<Scalar> dh;  // H x H
  Mat<Scalar> dw;  // W x W

  Dct2() = default;
  Dct2(int h, int w) : dh(dct_matrix<Scalar>(h)), dw(dct_matrix<Scalar>(w)) {}

  Mat<Scalar> forward(const Mat<Scalar>& x) const {
    if (x.rows() != dh.rows() || x.cols() != dw.rows())
      throw ContractError("dct2: shape mismatch");
    require_finite(x, "dct2 input");
    return dh * x * dw.transpose();
  }

  Mat<Scalar> inverse(const Mat<Scalar>& coeff) const {
    if (coeff.rows() != dh.rows() || coeff.cols() != dw.rows())
      throw ContractError("idct2: shape mismatch");
    require_finite(coeff, "idct2 input");
    return dh.transpose() * coeff * dw;
  }

  // IDCT(m . DCT(x)). Self-adjoint, so it is its own gradient operator.
  Mat<Scalar> filter(const Mat<Scalar>& x, const FrequencyMask& m) const {
    if (m.h != x.rows() || m.w != x.cols()) throw ContractError("filter_noise: shape mismatch");
    Mat<Scalar> coeff = forward(x);
    coeff.block(0, m.keep_v, m.h, m.w - m.keep_v).setZero();
    coeff.block(m.keep_u, 0, m.h - m.keep_u, m.keep_v).setZero();
    return inverse(coeff);
  }
};

template <class Scalar>
Mat<Scalar> dct2(const Mat<Scalar>& x) {
  return Dct2<Scalar>(static_cast<int>(x.rows()), static_cast<int>(x.cols())).forward(x);
}

template <class Scalar>
Mat<Scalar> idct2(const Mat<Scalar>& coeff) {
  return Dct2<Scalar>(static_cast<int>(coeff.rows()), static_cast<int>(coeff.cols()))
      .inverse(coeff);
}

// Per-channel mask filter over a flattened (c-major) image column.
template <class Scalar>
Vec<Scalar> filter_noise(const Vec<Scalar>& image, Shape3 shape, const FrequencyMask& mask,
                         const Dct2<Scalar>& dct) {
  if (image.size() != shape.size()) throw ContractError("filter_noise: flat size mismatch");
  Vec<Scalar> out(image.size());
  const int plane = shape.h * shape.w;
  for (int c = 0; c < shape.c; ++c) {
    // Column-major map: column index = h, row index = w? Keep (h, w) explicit instead.
    Eigen::Map<const Mat<Scalar>> xin(image.data() + c * plane, shape.w, shape.h);
    Mat<Scalar> x = xin.transpose();  // h x w with row-major pixel order
    Mat<Scalar> y = dct.filter(x, mask);
    Eigen::Map<Mat<Scalar>> xout(out.data() + c * plane, shape.w, shape.h);
    xout = y.transpose();
  }
  return out;
}

}  // namespace rbd
