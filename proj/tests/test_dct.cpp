#include <doctest.h>

#include "rbd/dct.hpp"
#include "support/oracles.hpp"

using rbd::Dct2;
using rbd::FrequencyMask;
using rbd::Mat;
using rbd::Vec;

namespace {
Mat<double> random_image(int h, int w, rbd::Rng& rng) {
  Mat<double> x(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) x(i, j) = rbd::uniform_in(rng, -1.0, 1.0);
  return x;
}
}  // namespace

TEST_CASE("dct2 of a constant image is a single DC coefficient") {
  const int n = 16;
  const double c = 0.37;
  Mat<double> x = Mat<double>::Constant(n, n, c);
  Mat<double> coeff = rbd::dct2(x);
  CHECK(coeff(0, 0) == doctest::Approx(c * std::sqrt(double(n) * n)).epsilon(1e-12));
  coeff(0, 0) = 0.0;
  CHECK(coeff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dct2/idct2 round-trip and Parseval on random 32x32 images") {
  rbd::Rng rng(7);
  Dct2<double> dct(32, 32);
  for (int trial = 0; trial < 20; ++trial) {
    Mat<double> x = random_image(32, 32, rng);
    Mat<double> coeff = dct.forward(x);
    Mat<double> back = dct.inverse(coeff);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(coeff.norm() - x.norm()) / x.norm() < 1e-6);
  }
}

TEST_CASE("dct2 agrees with the direct O(N^2) summation oracle on 8x8") {
  rbd::Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Mat<double> x = random_image(8, 8, rng);
    Mat<double> fast = rbd::dct2(x);
    Mat<double> direct = oracle::dct2_direct(x);
    CHECK((fast - direct).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("dct2 rejects non-finite input") {
  Mat<double> x = Mat<double>::Zero(8, 8);
  x(3, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rbd::dct2(x), rbd::NumericalFault);
}

TEST_CASE("mask ratio 0.65 on 32x32 retains exactly 441 coefficients") {
  FrequencyMask m(32, 32, 0.65);
  CHECK(m.support_count() == 441);
  // Count by direct enumeration as well.
  int count = 0;
  for (int u = 0; u < 32; ++u)
    for (int v = 0; v < 32; ++v) count += m.retained(u, v) ? 1 : 0;
  CHECK(count == 441);
}

TEST_CASE("filter_noise zeroes all energy outside the mask support") {
  rbd::Rng rng(3);
  rbd::Shape3 sh{3, 32, 32};
  Dct2<double> dct(32, 32);
  FrequencyMask m(32, 32, 0.65);
  Vec<double> img(sh.size());
  for (long i = 0; i < img.size(); ++i) img[i] = rbd::uniform_in(rng, -1.0, 1.0);
  Vec<double> filtered = rbd::filter_noise(img, sh, m, dct);
  const int plane = 32 * 32;
  for (int c = 0; c < 3; ++c) {
    Mat<double> chan(32, 32);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) chan(y, x) = filtered[c * plane + y * 32 + x];
    Mat<double> coeff = dct.forward(chan);
    for (int u = 0; u < 32; ++u)
      for (int v = 0; v < 32; ++v)
        if (!m.retained(u, v)) CHECK(std::abs(coeff(u, v)) < 1e-6);
  }
}

TEST_CASE("full mask is the identity, and filtering is idempotent") {
  rbd::Rng rng(5);
  rbd::Shape3 sh{1, 16, 16};
  Dct2<double> dct(16, 16);
  Vec<double> img(sh.size());
  for (long i = 0; i < img.size(); ++i) img[i] = rbd::uniform_in(rng, -1.0, 1.0);

  FrequencyMask full(16, 16, 1.0);
  Vec<double> same = rbd::filter_noise(img, sh, full, dct);
  CHECK((same - img).cwiseAbs().maxCoeff() < 1e-6);

  FrequencyMask part(16, 16, 0.4);
  Vec<double> once = rbd::filter_noise(img, sh, part, dct);
  Vec<double> twice = rbd::filter_noise(once, sh, part, dct);
  CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("mask ratio outside (0,1] is rejected") {
  CHECK_THROWS_AS(FrequencyMask(32, 32, 0.0), rbd::ConfigError);
  CHECK_THROWS_AS(FrequencyMask(32, 32, 1.5), rbd::ConfigError);
}

TEST_CASE("filter_noise is self-adjoint") {
  rbd::Rng rng(13);
  rbd::Shape3 sh{1, 12, 12};
  Dct2<double> dct(12, 12);
  FrequencyMask m(12, 12, 0.5);
  Vec<double> a(sh.size()), b(sh.size());
  for (long i = 0; i < a.size(); ++i) {
    a[i] = rbd::uniform_in(rng, -1.0, 1.0);
    b[i] = rbd::uniform_in(rng, -1.0, 1.0);
  }
  Vec<double> fa = rbd::filter_noise(a, sh, m, dct);
  Vec<double> fb = rbd::filter_noise(b, sh, m, dct);
  CHECK(fa.dot(b) == doctest::Approx(a.dot(fb)).epsilon(1e-10));
}
