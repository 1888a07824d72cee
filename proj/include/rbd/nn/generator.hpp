#pragma once

#include "rbd/nn/layers.hpp"

namespace rbd::nn {

struct GeneratorSpec {
  Shape3 in_shape{3, 32, 32};
  int base_channels = 8;

  void validate() const {
    if (in_shape.c <= 0 || in_shape.h <= 0 || in_shape.w <= 0)
      throw ConfigError("GeneratorSpec: non-positive input shape");
    if (in_shape.h % 2 != 0 || in_shape.w % 2 != 0)
      throw ConfigError("GeneratorSpec: spatial dims must be even");
    if (base_channels <= 0) throw ConfigError("GeneratorSpec: non-positive base_channels");
  }
};

// Two-level encoder-decoder noise network with a full-resolution skip
// connection and tanh-bounded output of the same shape as the input.
template <class Scalar>
class NoiseGenerator {
 public:
  NoiseGenerator() = default;

  explicit NoiseGenerator(const GeneratorSpec& spec) : spec_(spec) {
    spec.validate();
    const int c = spec.base_channels;
    enc0_ = Conv2d<Scalar>("enc0", spec.in_shape, c, 3, 1, 1);
    enc1_ = Conv2d<Scalar>("enc1", enc0_.out_shape(), 2 * c, 3, 2, 1);
    mid_ = Conv2d<Scalar>("mid", enc1_.out_shape(), 2 * c, 3, 1, 1);
    up_ = Upsample2x<Scalar>(mid_.out_shape());
    Shape3 cat_shape{3 * c, spec.in_shape.h, spec.in_shape.w};
    dec_ = Conv2d<Scalar>("dec", cat_shape, c, 3, 1, 1);
    out_ = Conv2d<Scalar>("out", dec_.out_shape(), spec.in_shape.c, 3, 1, 1);
  }

  void init(Rng& rng) {
    enc0_.init(rng);
    enc1_.init(rng);
    mid_.init(rng);
    dec_.init(rng);
    out_.init(rng);
  }

  const GeneratorSpec& spec() const { return spec_; }
  Shape3 in_shape() const { return spec_.in_shape; }

  Mat<Scalar> forward(const Mat<Scalar>& x) {
    if (x.rows() != spec_.in_shape.size())
      throw ContractError("NoiseGenerator: input shape mismatch");
    require_finite(x, "generator input");
    e0_ = r0_.forward(enc0_.forward(x));
    Mat<Scalar> e1 = r1_.forward(enc1_.forward(e0_));
    Mat<Scalar> m = rm_.forward(mid_.forward(e1));
    Mat<Scalar> u = up_.forward(m);
    Mat<Scalar> cat(e0_.rows() + u.rows(), x.cols());
    cat.topRows(e0_.rows()) = e0_;
    cat.bottomRows(u.rows()) = u;
    Mat<Scalar> d = rd_.forward(dec_.forward(cat));
    return act_.forward(out_.forward(d));
  }

  // Accumulates parameter gradients; input gradients are not propagated
  // (the generator input is data).
  void backward(const Mat<Scalar>& dy) {
    Mat<Scalar> dd = out_.backward(act_.backward(dy), true, true);
    Mat<Scalar> dcat = dec_.backward(rd_.backward(dd), true, true);
    Mat<Scalar> de0 = dcat.topRows(e0_.rows());
    Mat<Scalar> du = dcat.bottomRows(dcat.rows() - e0_.rows());
    Mat<Scalar> dm = rm_.backward(up_.backward(du));
    Mat<Scalar> de1 = mid_.backward(dm, true, true);
    de0 += enc1_.backward(r1_.backward(de1), true, true);
    enc0_.backward(r0_.backward(de0), false, true);
  }

  std::vector<ParamTensor<Scalar>*> params() {
    std::vector<ParamTensor<Scalar>*> ps;
    for (auto* p : enc0_.params()) ps.push_back(p);
    for (auto* p : enc1_.params()) ps.push_back(p);
    for (auto* p : mid_.params()) ps.push_back(p);
    for (auto* p : dec_.params()) ps.push_back(p);
    for (auto* p : out_.params()) ps.push_back(p);
    return ps;
  }
  std::vector<const ParamTensor<Scalar>*> params() const {
    auto ps = const_cast<NoiseGenerator*>(this)->params();
    return {ps.begin(), ps.end()};
  }

  std::vector<BufferTensor<Scalar>*> buffers() { return {}; }
  std::vector<const BufferTensor<Scalar>*> buffers() const { return {}; }

 private:
  GeneratorSpec spec_;
  Conv2d<Scalar> enc0_, enc1_, mid_, dec_, out_;
  Upsample2x<Scalar> up_;
  Relu<Scalar> r0_, r1_, rm_, rd_;
  Tanh<Scalar> act_;
  Mat<Scalar> e0_;
};

}  // namespace rbd::nn
