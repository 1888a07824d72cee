#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "rbd/errors.hpp"

namespace rbd {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

// (channels, height, width) of one image / activation map.
struct Shape3 {
  int c = 0;
  int h = 0;
  int w = 0;

  int size() const { return c * h * w; }
  bool operator==(const Shape3&) const = default;
};

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Stable sub-seed derivation so stages don't share RNG streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = fnv1a64(tag);
  h ^= master + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// Bounded draw, stable across standard libraries (unlike uniform_int_distribution).
inline std::size_t bounded(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller; one value per call, stable across standard libraries.
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// In-place Fisher-Yates with our own bounded draw (byte-stable output).
template <class T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

template <class Scalar>
void require_finite(const Mat<Scalar>& m, std::string_view what) {
  if (!m.allFinite()) throw NumericalFault(std::string(what) + ": non-finite values");
}

}  // namespace rbd
