#pragma once

#include "rbd/blur.hpp"
#include "rbd/dct.hpp"
#include "rbd/nn/generator.hpp"

namespace rbd {

struct TriggerConfig {
  double eta = 0.08;
  double mask_ratio = 0.65;
  int blur_kernel_size = 3;  // 1 disables blurring
  double sigma_min = 0.1;
  double sigma_max = 1.0;

  void validate() const {
    if (eta < 0) throw ConfigError("TriggerConfig: eta must be >= 0");
    if (mask_ratio <= 0.0 || mask_ratio > 1.0)
      throw ConfigError("TriggerConfig: mask_ratio must be in (0,1]");
    if (blur_kernel_size < 1 || blur_kernel_size % 2 == 0)
      throw ConfigError("TriggerConfig: blur kernel size must be odd");
    if (blur_kernel_size > 1 && (sigma_min <= 0 || sigma_max < sigma_min))
      throw ConfigError("TriggerConfig: bad sigma range");
  }

  // Fixed sigma used for dataset construction and evaluation.
  double eval_sigma() const { return 0.5 * (sigma_min + sigma_max); }
};

inline double sample_sigma(const TriggerConfig& cfg, Rng& rng) {
  return uniform_in(rng, cfg.sigma_min, cfg.sigma_max);
}

// Applies G(x) = clamp(blur(x + eta * IDCT(m . DCT(g(x))), k)) and carries
// the caches needed to push gradients back into the generator.
template <class Scalar>
class TriggerApplier {
 public:
  TriggerApplier() = default;
  TriggerApplier(Shape3 shape, TriggerConfig cfg, Vec<Scalar> clamp_lo, Vec<Scalar> clamp_hi)
      : shape_(shape),
        cfg_(cfg),
        dct_(shape.h, shape.w),
        mask_(shape.h, shape.w, cfg.mask_ratio),
        lo_(std::move(clamp_lo)),
        hi_(std::move(clamp_hi)) {
    cfg.validate();
    if (lo_.size() != shape.c || hi_.size() != shape.c)
      throw ContractError("TriggerApplier: clamp range per channel required");
  }

  const TriggerConfig& config() const { return cfg_; }
  const FrequencyMask& mask() const { return mask_; }
  Shape3 shape() const { return shape_; }

  struct Forward {
    Mat<Scalar> noise;      // IDCT(m . DCT(g(x)))
    Mat<Scalar> triggered;  // G(x)
    Mat<Scalar> pass;       // clamp pass-through mask
    GaussianKernel<Scalar> kernel;
  };

  // Differentiable path; sigma is supplied by the caller (sampled per batch
  // in training, cfg.eval_sigma() for evaluation).
  Forward apply(nn::NoiseGenerator<Scalar>& gen, const Mat<Scalar>& x, double sigma) {
    if (x.rows() != shape_.size()) throw ContractError("apply_trigger: input shape mismatch");
    Forward f;
    f.kernel = cfg_.blur_kernel_size > 1
                   ? GaussianKernel<Scalar>(cfg_.blur_kernel_size, sigma)
                   : GaussianKernel<Scalar>();
    Mat<Scalar> raw = gen.forward(x);
    f.noise.resize(x.rows(), x.cols());
    for (long j = 0; j < x.cols(); ++j) {
      Vec<Scalar> col = raw.col(j);
      f.noise.col(j) = filter_noise<Scalar>(col, shape_, mask_, dct_);
    }
    const Scalar eta = static_cast<Scalar>(cfg_.eta);
    f.triggered.resize(x.rows(), x.cols());
    f.pass.resize(x.rows(), x.cols());
    const int plane = shape_.h * shape_.w;
    for (long j = 0; j < x.cols(); ++j) {
      Vec<Scalar> pre = x.col(j) + eta * f.noise.col(j);
      Vec<Scalar> b = blur(pre, shape_, f.kernel);
      for (int c = 0; c < shape_.c; ++c) {
        for (int p = 0; p < plane; ++p) {
          const long i = c * plane + p;
          const Scalar v = b[i];
          const bool inside = v >= lo_[c] && v <= hi_[c];
          f.pass(i, j) = inside ? Scalar(1) : Scalar(0);
          f.triggered(i, j) = inside ? v : (v < lo_[c] ? lo_[c] : hi_[c]);
        }
      }
    }
    return f;
  }

  // Evaluation-mode application at fixed sigma (no gradient caches kept by
  // the caller; the generator's internal caches are simply overwritten).
  Mat<Scalar> apply_eval(nn::NoiseGenerator<Scalar>& gen, const Mat<Scalar>& x) {
    return apply(gen, x, cfg_.eval_sigma()).triggered;
  }

  // Pushes loss gradients into the generator's parameter gradients.
  // d_triggered flows through clamp -> blur -> eta * mask-filter; d_noise
  // (if present) enters directly at the filtered-noise node, which the
  // visibility loss uses.
  void backward(nn::NoiseGenerator<Scalar>& gen, const Forward& f,
                const Mat<Scalar>* d_triggered, const Mat<Scalar>* d_noise = nullptr) {
    const long n = f.triggered.cols();
    Mat<Scalar> d_raw(shape_.size(), n);
    const Scalar eta = static_cast<Scalar>(cfg_.eta);
    for (long j = 0; j < n; ++j) {
      Vec<Scalar> dfn = Vec<Scalar>::Zero(shape_.size());
      if (d_triggered) {
        Vec<Scalar> dy = d_triggered->col(j).cwiseProduct(f.pass.col(j));
        dfn = eta * blur_adjoint<Scalar>(dy, shape_, f.kernel);
      }
      if (d_noise) dfn += d_noise->col(j);
      // The mask filter is self-adjoint.
      d_raw.col(j) = filter_noise<Scalar>(dfn, shape_, mask_, dct_);
    }
    gen.backward(d_raw);
  }

  // blur(x) alone, at evaluation sigma -- reference point for perturbation
  // magnitude measurements.
  Mat<Scalar> blur_only(const Mat<Scalar>& x) const {
    GaussianKernel<Scalar> k = cfg_.blur_kernel_size > 1
                                   ? GaussianKernel<Scalar>(cfg_.blur_kernel_size,
                                                            cfg_.eval_sigma())
                                   : GaussianKernel<Scalar>();
    Mat<Scalar> out(x.rows(), x.cols());
    for (long j = 0; j < x.cols(); ++j) {
      Vec<Scalar> col = x.col(j);
      out.col(j) = blur<Scalar>(col, shape_, k);
    }
    return out;
  }

 private:
  Shape3 shape_{};
  TriggerConfig cfg_{};
  Dct2<Scalar> dct_;
  FrequencyMask mask_;
  Vec<Scalar> lo_, hi_;
};

template <class Scalar>
TriggerApplier<Scalar> make_trigger_applier(const LabeledDataset<Scalar>& ds,
                                            const TriggerConfig& cfg) {
  Vec<Scalar> lo(ds.shape.c), hi(ds.shape.c);
  for (int c = 0; c < ds.shape.c; ++c) {
    lo[c] = ds.lo(c);
    hi[c] = ds.hi(c);
  }
  return TriggerApplier<Scalar>(ds.shape, cfg, std::move(lo), std::move(hi));
}

}  // namespace rbd
