#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rbd/common.hpp"

namespace rbd {

// Minimal truecolor PNG emission (zlib-backed).
void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& rgb);

// Renders a grid of normalized images (one per column of `images`) to PNG,
// de-normalizing with the given per-channel mean/std.  Grayscale inputs are
// replicated across RGB.
template <class Scalar>
void write_image_grid(const std::filesystem::path& path, const Mat<Scalar>& images, Shape3 shape,
                      const Vec<Scalar>& mean, const Vec<Scalar>& std, int columns = 8) {
  const long n = images.cols();
  if (n == 0) throw ContractError("write_image_grid: no images");
  const int cols = static_cast<int>(std::min<long>(columns, n));
  const int rows = static_cast<int>((n + cols - 1) / cols);
  const int pad = 2;
  const int gw = cols * (shape.w + pad) + pad;
  const int gh = rows * (shape.h + pad) + pad;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(gw) * gh * 3, 32);
  const int plane = shape.h * shape.w;
  for (long i = 0; i < n; ++i) {
    const int gy = static_cast<int>(i) / cols;
    const int gx = static_cast<int>(i) % cols;
    const int oy = pad + gy * (shape.h + pad);
    const int ox = pad + gx * (shape.w + pad);
    for (int y = 0; y < shape.h; ++y) {
      for (int x = 0; x < shape.w; ++x) {
        for (int ch = 0; ch < 3; ++ch) {
          const int src_c = shape.c == 1 ? 0 : ch;
          const double v = static_cast<double>(images(src_c * plane + y * shape.w + x, i)) *
                               static_cast<double>(std[src_c]) +
                           static_cast<double>(mean[src_c]);
          const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
          rgb[(static_cast<std::size_t>(oy + y) * gw + (ox + x)) * 3 + ch] =
              static_cast<std::uint8_t>(q);
        }
      }
    }
  }
  write_png_rgb8(path, gw, gh, rgb);
}

}  // namespace rbd
