#pragma once

#include <cmath>

#include "rbd/common.hpp"

namespace rbd {

// Normalized Gaussian kernel; size 1 degenerates to the identity.
template <class Scalar>
struct GaussianKernel {
  int size = 1;
  Mat<Scalar> weights;  // size x size, sums to 1

  GaussianKernel() : weights(Mat<Scalar>::Ones(1, 1)) {}

  GaussianKernel(int ksize, double sigma) : size(ksize) {
    if (ksize < 1 || ksize % 2 == 0) throw ConfigError("GaussianKernel: size must be odd and >= 1");
    if (ksize > 1 && sigma <= 0.0) throw ConfigError("GaussianKernel: sigma must be positive");
    weights.resize(ksize, ksize);
    const int r = ksize / 2;
    double total = 0.0;
    for (int i = 0; i < ksize; ++i) {
      for (int j = 0; j < ksize; ++j) {
        const double dy = i - r;
        const double dx = j - r;
        const double v = ksize == 1 ? 1.0 : std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        weights(i, j) = static_cast<Scalar>(v);
        total += v;
      }
    }
    weights /= static_cast<Scalar>(total);
  }

  bool is_identity() const { return size == 1; }
};

namespace detail {
// Mirror index without edge repetition: -1 -> 1, n -> n-2.
inline int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}
}  // namespace detail

// Per-channel 2-D correlation with mirrored borders.  Weights are convex,
// so the output stays inside the input's per-channel value range.
template <class Scalar>
Vec<Scalar> blur(const Vec<Scalar>& image, Shape3 shape, const GaussianKernel<Scalar>& k) {
  if (image.size() != shape.size()) throw ContractError("blur: flat size mismatch");
  if (k.is_identity()) return image;
  Vec<Scalar> out(image.size());
  const int r = k.size / 2;
  const int plane = shape.h * shape.w;
  for (int c = 0; c < shape.c; ++c) {
    const Scalar* src = image.data() + c * plane;
    Scalar* dst = out.data() + c * plane;
    for (int y = 0; y < shape.h; ++y) {
      for (int x = 0; x < shape.w; ++x) {
        Scalar acc = 0;
        for (int i = 0; i < k.size; ++i) {
          const int sy = detail::mirror(y + i - r, shape.h);
          for (int j = 0; j < k.size; ++j) {
            const int sx = detail::mirror(x + j - r, shape.w);
            acc += k.weights(i, j) * src[sy * shape.w + sx];
          }
        }
        dst[y * shape.w + x] = acc;
      }
    }
  }
  return out;
}

// Exact adjoint of blur() under the same mirrored-border scheme.
template <class Scalar>
Vec<Scalar> blur_adjoint(const Vec<Scalar>& grad, Shape3 shape, const GaussianKernel<Scalar>& k) {
  if (grad.size() != shape.size()) throw ContractError("blur_adjoint: flat size mismatch");
  if (k.is_identity()) return grad;
  Vec<Scalar> out = Vec<Scalar>::Zero(grad.size());
  const int r = k.size / 2;
  const int plane = shape.h * shape.w;
  for (int c = 0; c < shape.c; ++c) {
    const Scalar* g = grad.data() + c * plane;
    Scalar* dst = out.data() + c * plane;
    for (int y = 0; y < shape.h; ++y) {
      for (int x = 0; x < shape.w; ++x) {
        const Scalar gv = g[y * shape.w + x];
        for (int i = 0; i < k.size; ++i) {
          const int sy = detail::mirror(y + i - r, shape.h);
          for (int j = 0; j < k.size; ++j) {
            const int sx = detail::mirror(x + j - r, shape.w);
            dst[sy * shape.w + sx] += k.weights(i, j) * gv;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace rbd
