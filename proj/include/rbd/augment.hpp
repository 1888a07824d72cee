#pragma once

#include <cmath>

#include "rbd/dataset.hpp"

namespace rbd {

// Training-batch augmentation on normalized images.  Fill value for crop
// padding and rotation borders is normalized black, per channel.

namespace detail {

template <class Scalar>
void hflip(Scalar* img, Shape3 sh) {
  const int plane = sh.h * sh.w;
  for (int c = 0; c < sh.c; ++c)
    for (int y = 0; y < sh.h; ++y)
      for (int x = 0; x < sh.w / 2; ++x)
        std::swap(img[c * plane + y * sh.w + x], img[c * plane + y * sh.w + (sh.w - 1 - x)]);
}

template <class Scalar>
void shift_crop(Scalar* img, Shape3 sh, int dy, int dx, const Vec<Scalar>& fill) {
  const int plane = sh.h * sh.w;
  std::vector<Scalar> tmp(img, img + sh.size());
  for (int c = 0; c < sh.c; ++c) {
    for (int y = 0; y < sh.h; ++y) {
      for (int x = 0; x < sh.w; ++x) {
        const int sy = y + dy;
        const int sx = x + dx;
        img[c * plane + y * sh.w + x] =
            (sy >= 0 && sy < sh.h && sx >= 0 && sx < sh.w) ? tmp[c * plane + sy * sh.w + sx]
                                                           : fill[c];
      }
    }
  }
}

template <class Scalar>
void rotate_bilinear(Scalar* img, Shape3 sh, double degrees, const Vec<Scalar>& fill) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  const double cy = (sh.h - 1) / 2.0;
  const double cx = (sh.w - 1) / 2.0;
  const int plane = sh.h * sh.w;
  std::vector<Scalar> tmp(img, img + sh.size());
  for (int c = 0; c < sh.c; ++c) {
    for (int y = 0; y < sh.h; ++y) {
      for (int x = 0; x < sh.w; ++x) {
        const double sy = (x - cx) * sn + (y - cy) * cs + cy;
        const double sx = (x - cx) * cs - (y - cy) * sn + cx;
        const int y0 = static_cast<int>(std::floor(sy));
        const int x0 = static_cast<int>(std::floor(sx));
        Scalar v = fill[c];
        if (y0 >= 0 && y0 + 1 < sh.h && x0 >= 0 && x0 + 1 < sh.w) {
          const double wy = sy - y0;
          const double wx = sx - x0;
          const Scalar* p = tmp.data() + c * plane;
          v = static_cast<Scalar>((1 - wy) * ((1 - wx) * p[y0 * sh.w + x0] +
                                              wx * p[y0 * sh.w + x0 + 1]) +
                                  wy * ((1 - wx) * p[(y0 + 1) * sh.w + x0] +
                                        wx * p[(y0 + 1) * sh.w + x0 + 1]));
        }
        img[c * plane + y * sh.w + x] = v;
      }
    }
  }
}

}  // namespace detail

// In-place augmentation of one flattened image column.
template <class Scalar>
void augment_image(Scalar* img, Shape3 sh, const AugmentFlags& flags, const Vec<Scalar>& fill,
                   Rng& rng) {
  if (flags.horizontal_flip && uniform01(rng) < 0.5) detail::hflip(img, sh);
  if (flags.rotation && uniform01(rng) < 0.5)
    detail::rotate_bilinear(img, sh, uniform_in(rng, -15.0, 15.0), fill);
  if (flags.crop && uniform01(rng) < 0.5) {
    const int pad = 4;
    const int dy = static_cast<int>(bounded(rng, 2 * pad + 1)) - pad;
    const int dx = static_cast<int>(bounded(rng, 2 * pad + 1)) - pad;
    detail::shift_crop(img, sh, dy, dx, fill);
  }
}

template <class Scalar>
Vec<Scalar> normalized_black(const LabeledDataset<Scalar>& ds) {
  Vec<Scalar> fill(ds.shape.c);
  for (int c = 0; c < ds.shape.c; ++c) fill[c] = ds.lo(c);
  return fill;
}

}  // namespace rbd
