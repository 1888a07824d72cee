#include <doctest.h>

#include "rbd/blur.hpp"

using rbd::GaussianKernel;
using rbd::Shape3;
using rbd::Vec;

TEST_CASE("gaussian kernel weights sum to one") {
  for (double sigma : {0.1, 0.55, 1.0, 3.0}) {
    GaussianKernel<double> k(3, sigma);
    CHECK(k.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.weights.minCoeff() > 0.0);
  }
  GaussianKernel<double> k5(5, 0.8);
  CHECK(k5.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kernel size 1 is the identity") {
  rbd::Rng rng(2);
  Shape3 sh{2, 8, 8};
  Vec<double> img(sh.size());
  for (long i = 0; i < img.size(); ++i) img[i] = rbd::uniform_in(rng, -2.0, 2.0);
  GaussianKernel<double> k;
  CHECK((rbd::blur(img, sh, k) - img).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("blur of a constant image is the same constant") {
  Shape3 sh{1, 10, 10};
  Vec<double> img = Vec<double>::Constant(sh.size(), 0.73);
  GaussianKernel<double> k(3, 0.55);
  Vec<double> out = rbd::blur(img, sh, k);
  CHECK((out.array() - 0.73).abs().maxCoeff() < 1e-12);
}

TEST_CASE("blur output stays within the input value range") {
  rbd::Rng rng(9);
  Shape3 sh{3, 16, 16};
  Vec<double> img(sh.size());
  for (long i = 0; i < img.size(); ++i) img[i] = rbd::uniform_in(rng, -1.0, 3.0);
  GaussianKernel<double> k(3, 0.4);
  Vec<double> out = rbd::blur(img, sh, k);
  CHECK(out.maxCoeff() <= img.maxCoeff() + 1e-12);
  CHECK(out.minCoeff() >= img.minCoeff() - 1e-12);
}

TEST_CASE("blur_adjoint is the exact adjoint of blur") {
  rbd::Rng rng(4);
  Shape3 sh{2, 9, 7};
  for (int trial = 0; trial < 10; ++trial) {
    Vec<double> a(sh.size()), b(sh.size());
    for (long i = 0; i < a.size(); ++i) {
      a[i] = rbd::uniform_in(rng, -1.0, 1.0);
      b[i] = rbd::uniform_in(rng, -1.0, 1.0);
    }
    GaussianKernel<double> k(3, rbd::uniform_in(rng, 0.1, 1.0));
    CHECK(rbd::blur(a, sh, k).dot(b) == doctest::Approx(a.dot(rbd::blur_adjoint(b, sh, k)))
                                            .epsilon(1e-10));
  }
}

TEST_CASE("even or non-positive kernel sizes are rejected") {
  CHECK_THROWS_AS(GaussianKernel<double>(2, 0.5), rbd::ConfigError);
  CHECK_THROWS_AS(GaussianKernel<double>(-1, 0.5), rbd::ConfigError);
  CHECK_THROWS_AS(GaussianKernel<double>(3, 0.0), rbd::ConfigError);
}
