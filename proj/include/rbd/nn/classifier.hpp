#pragma once

#include <memory>
#include <optional>

#include "rbd/nn/layers.hpp"

namespace rbd::nn {

struct ClassifierSpec {
  Shape3 in_shape{3, 32, 32};
  int num_classes = 10;
  std::vector<int> widths{16, 32, 64};
  std::vector<int> blocks{1, 1, 1};

  void validate() const {
    if (in_shape.c <= 0 || in_shape.h <= 0 || in_shape.w <= 0)
      throw ConfigError("ClassifierSpec: non-positive input shape");
    if (num_classes < 2) throw ConfigError("ClassifierSpec: num_classes must be >= 2");
    if (widths.empty() || widths.size() != blocks.size())
      throw ConfigError("ClassifierSpec: widths/blocks mismatch");
    for (std::size_t i = 0; i < widths.size(); ++i)
      if (widths[i] <= 0 || blocks[i] <= 0)
        throw ConfigError("ClassifierSpec: non-positive width or block count");
  }
};

// Pre-activation residual block: BN-ReLU-Conv-BN-ReLU-Conv plus skip.
// A projection (1x1, strided) shortcut taps the pre-activated input when the
// shape changes; otherwise the raw input is carried through.
template <class Scalar>
class PreActBlock {
 public:
  PreActBlock() = default;
  PreActBlock(std::string name, Shape3 in, int out_channels, int stride)
      : bn1_(name + ".bn1", in),
        conv1_(name + ".conv1", in, out_channels, 3, stride, 1),
        bn2_(name + ".bn2", conv1_.out_shape()),
        conv2_(name + ".conv2", conv1_.out_shape(), out_channels, 3, 1, 1),
        has_proj_(stride != 1 || in.c != out_channels) {
    if (has_proj_)
      proj_ = Conv2d<Scalar>(name + ".shortcut", in, out_channels, 1, stride, 0);
  }

  void init(Rng& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
    if (has_proj_) proj_.init(rng);
  }

  Shape3 out_shape() const { return conv2_.out_shape(); }

  Mat<Scalar> forward(const Mat<Scalar>& x, bool train) {
    Mat<Scalar> t = relu1_.forward(bn1_.forward(x, train));
    Mat<Scalar> h = relu2_.forward(bn2_.forward(conv1_.forward(t), train));
    Mat<Scalar> y = conv2_.forward(h);
    if (has_proj_) {
      y += proj_.forward(t);
    } else {
      y += x;
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, bool want_dx, bool accum) {
    Mat<Scalar> dh = conv2_.backward(dy, true, accum);
    Mat<Scalar> dt = conv1_.backward(bn2_.backward(relu2_.backward(dh), true, accum), true, accum);
    if (has_proj_) dt += proj_.backward(dy, true, accum);
    Mat<Scalar> dx = bn1_.backward(relu1_.backward(dt), want_dx, accum);
    if (!want_dx) return {};
    if (!has_proj_) dx += dy;
    return dx;
  }

  void collect(std::vector<ParamTensor<Scalar>*>& ps, std::vector<BufferTensor<Scalar>*>& bs) {
    for (auto* p : bn1_.params()) ps.push_back(p);
    for (auto* p : conv1_.params()) ps.push_back(p);
    for (auto* p : bn2_.params()) ps.push_back(p);
    for (auto* p : conv2_.params()) ps.push_back(p);
    if (has_proj_)
      for (auto* p : proj_.params()) ps.push_back(p);
    for (auto* b : bn1_.buffers()) bs.push_back(b);
    for (auto* b : bn2_.buffers()) bs.push_back(b);
  }

 private:
  BatchNorm2d<Scalar> bn1_;
  Conv2d<Scalar> conv1_;
  BatchNorm2d<Scalar> bn2_;
  Conv2d<Scalar> conv2_;
  Conv2d<Scalar> proj_;
  Relu<Scalar> relu1_, relu2_;
  bool has_proj_ = false;
};

// Small pre-activation residual classifier: stem conv, three stages, BN-ReLU
// head with global average pooling.
template <class Scalar>
class PreActResNet {
 public:
  PreActResNet() = default;

  explicit PreActResNet(const ClassifierSpec& spec) : spec_(spec) {
    spec.validate();
    stem_ = Conv2d<Scalar>("stem", spec.in_shape, spec.widths[0], 3, 1, 1);
    Shape3 cur = stem_.out_shape();
    for (std::size_t s = 0; s < spec.widths.size(); ++s) {
      for (int b = 0; b < spec.blocks[s]; ++b) {
        const int stride = (s > 0 && b == 0) ? 2 : 1;
        std::string name = "stage" + std::to_string(s) + ".block" + std::to_string(b);
        blocks_.emplace_back(std::make_unique<PreActBlock<Scalar>>(name, cur, spec.widths[s],
                                                                   stride));
        cur = blocks_.back()->out_shape();
      }
    }
    feature_shape_ = cur;
    head_bn_ = BatchNorm2d<Scalar>("head.bn", cur);
    pool_ = GlobalAvgPool<Scalar>(cur);
    fc_ = Linear<Scalar>("head.fc", cur.c, spec.num_classes);
  }

  void init(Rng& rng) {
    stem_.init(rng);
    for (auto& b : blocks_) b->init(rng);
    fc_.init(rng);
  }

  const ClassifierSpec& spec() const { return spec_; }
  Shape3 in_shape() const { return spec_.in_shape; }
  int num_classes() const { return spec_.num_classes; }
  Shape3 feature_shape() const { return feature_shape_; }

  // Zero out selected channels of the final feature map (defense hook).
  void set_prune_mask(const Vec<Scalar>& channel_keep) {
    if (channel_keep.size() != feature_shape_.c)
      throw ContractError("set_prune_mask: channel count mismatch");
    prune_mask_ = channel_keep;
  }
  void clear_prune_mask() { prune_mask_.reset(); }

  Mat<Scalar> forward(const Mat<Scalar>& x, bool train) {
    if (x.rows() != spec_.in_shape.size()) throw ContractError("forward: input shape mismatch");
    require_finite(x, "classifier input");
    Mat<Scalar> h = stem_.forward(x);
    for (auto& b : blocks_) h = b->forward(h, train);
    if (prune_mask_) apply_mask(h);
    features_ = h;
    Mat<Scalar> f = head_relu_.forward(head_bn_.forward(h, train));
    Mat<Scalar> logits = fc_.forward(pool_.forward(f));
    require_finite(logits, "classifier logits");
    return logits;
  }

  // Final feature map from the most recent forward (c*h*w rows).
  const Mat<Scalar>& features() const { return features_; }

  Mat<Scalar> backward(const Mat<Scalar>& dlogits, bool want_dx, bool accum) {
    Mat<Scalar> d = pool_.backward(fc_.backward(dlogits, true, accum));
    d = head_bn_.backward(head_relu_.backward(d), true, accum);
    if (prune_mask_) apply_mask(d);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      d = (*it)->backward(d, true, accum);
    return stem_.backward(d, want_dx, accum);
  }

  std::vector<ParamTensor<Scalar>*> params() {
    std::vector<ParamTensor<Scalar>*> ps;
    std::vector<BufferTensor<Scalar>*> bs;
    collect(ps, bs);
    return ps;
  }
  std::vector<const ParamTensor<Scalar>*> params() const {
    auto ps = const_cast<PreActResNet*>(this)->params();
    return {ps.begin(), ps.end()};
  }

  std::vector<BufferTensor<Scalar>*> buffers() {
    std::vector<ParamTensor<Scalar>*> ps;
    std::vector<BufferTensor<Scalar>*> bs;
    collect(ps, bs);
    return bs;
  }
  std::vector<const BufferTensor<Scalar>*> buffers() const {
    auto bs = const_cast<PreActResNet*>(this)->buffers();
    return {bs.begin(), bs.end()};
  }

 private:
  void collect(std::vector<ParamTensor<Scalar>*>& ps, std::vector<BufferTensor<Scalar>*>& bs) {
    for (auto* p : stem_.params()) ps.push_back(p);
    for (auto& b : blocks_) b->collect(ps, bs);
    for (auto* p : head_bn_.params()) ps.push_back(p);
    for (auto* b : head_bn_.buffers()) bs.push_back(b);
    for (auto* p : fc_.params()) ps.push_back(p);
  }

  void apply_mask(Mat<Scalar>& h) const {
    const int plane = feature_shape_.h * feature_shape_.w;
    for (int c = 0; c < feature_shape_.c; ++c)
      if ((*prune_mask_)[c] == Scalar(0)) h.middleRows(c * plane, plane).setZero();
  }

  ClassifierSpec spec_;
  Conv2d<Scalar> stem_;
  std::vector<std::unique_ptr<PreActBlock<Scalar>>> blocks_;
  BatchNorm2d<Scalar> head_bn_;
  Relu<Scalar> head_relu_;
  GlobalAvgPool<Scalar> pool_;
  Linear<Scalar> fc_;
  Shape3 feature_shape_{};
  std::optional<Vec<Scalar>> prune_mask_;
  Mat<Scalar> features_;
};

}  // namespace rbd::nn
