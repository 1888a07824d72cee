#pragma once

#include <cmath>
#include <string>

#include "rbd/nn/param.hpp"

namespace rbd::nn {

// Layers cache what their backward pass needs; backward may be invoked
// repeatedly against the same cached forward (caches are read-only there).
// Activations are (c*h*w) x N matrices, one column per sample, channel-major
// rows.

template <class Scalar>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, Shape3 in, int out_channels, int ksize, int stride, int pad)
      : in_(in), out_c_(out_channels), k_(ksize), stride_(stride), pad_(pad) {
    out_ = {out_c_, (in_.h + 2 * pad_ - k_) / stride_ + 1, (in_.w + 2 * pad_ - k_) / stride_ + 1};
    weight_.resize(name + ".weight", {out_c_, in_.c, k_, k_});
    bias_.resize(name + ".bias", {out_c_});
  }

  void init(Rng& rng) {
    const double fan_in = static_cast<double>(in_.c) * k_ * k_;
    const double std = std::sqrt(2.0 / fan_in);
    for (long i = 0; i < weight_.value.size(); ++i)
      weight_.value[i] = static_cast<Scalar>(normal01(rng) * std);
    bias_.value.setZero();
  }

  Shape3 in_shape() const { return in_; }
  Shape3 out_shape() const { return out_; }
  ParamTensor<Scalar>& weight() { return weight_; }
  ParamTensor<Scalar>& bias() { return bias_; }

  Mat<Scalar> forward(const Mat<Scalar>& x) {
    if (x.rows() != in_.size()) throw ContractError("Conv2d: input shape mismatch");
    x_ = x;
    const long n = x.cols();
    const int rows = in_.c * k_ * k_;
    const int cols_n = out_.h * out_.w;
    Mat<Scalar> y(out_.size(), n);
    Eigen::Map<const Mat<Scalar>> wmat(weight_.value.data(), out_c_, rows);
    Mat<Scalar> cols(rows, cols_n);
    for (long s = 0; s < n; ++s) {
      im2col(x.col(s).data(), cols);
      Mat<Scalar> ycol = wmat * cols;
      ycol.colwise() += bias_.value;
      Eigen::Map<Mat<Scalar>> yview(y.col(s).data(), cols_n, out_c_);
      yview = ycol.transpose();
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, bool want_dx, bool accum_param_grads) {
    if (dy.rows() != out_.size() || dy.cols() != x_.cols())
      throw ContractError("Conv2d: gradient shape mismatch");
    const long n = x_.cols();
    const int rows = in_.c * k_ * k_;
    const int cols_n = out_.h * out_.w;
    Eigen::Map<const Mat<Scalar>> wmat(weight_.value.data(), out_c_, rows);
    Eigen::Map<Mat<Scalar>> dwmat(weight_.grad.data(), out_c_, rows);
    Mat<Scalar> dx;
    if (want_dx) dx = Mat<Scalar>::Zero(in_.size(), n);
    Mat<Scalar> cols(rows, cols_n);
    for (long s = 0; s < n; ++s) {
      Eigen::Map<const Mat<Scalar>> dyview(dy.col(s).data(), cols_n, out_c_);
      Mat<Scalar> dycol = dyview.transpose();
      if (accum_param_grads) {
        im2col(x_.col(s).data(), cols);
        dwmat.noalias() += dycol * cols.transpose();
        bias_.grad += dycol.rowwise().sum();
      }
      if (want_dx) {
        Mat<Scalar> dcols = wmat.transpose() * dycol;
        col2im(dcols, dx.col(s).data());
      }
    }
    return dx;
  }

  std::vector<ParamTensor<Scalar>*> params() { return {&weight_, &bias_}; }

 private:
  void im2col(const Scalar* src, Mat<Scalar>& cols) const {
    const int plane = in_.h * in_.w;
    for (int oy = 0; oy < out_.h; ++oy) {
      for (int ox = 0; ox < out_.w; ++ox) {
        const int q = oy * out_.w + ox;
        Scalar* col = cols.col(q).data();
        int row = 0;
        for (int ic = 0; ic < in_.c; ++ic) {
          const Scalar* chan = src + ic * plane;
          for (int ky = 0; ky < k_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= in_.h) {
              for (int kx = 0; kx < k_; ++kx) col[row++] = Scalar(0);
              continue;
            }
            const Scalar* line = chan + iy * in_.w;
            for (int kx = 0; kx < k_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              col[row++] = (ix < 0 || ix >= in_.w) ? Scalar(0) : line[ix];
            }
          }
        }
      }
    }
  }

  void col2im(const Mat<Scalar>& dcols, Scalar* dst) const {
    const int plane = in_.h * in_.w;
    for (int oy = 0; oy < out_.h; ++oy) {
      for (int ox = 0; ox < out_.w; ++ox) {
        const int q = oy * out_.w + ox;
        const Scalar* col = dcols.col(q).data();
        int row = 0;
        for (int ic = 0; ic < in_.c; ++ic) {
          Scalar* chan = dst + ic * plane;
          for (int ky = 0; ky < k_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= in_.h) {
              row += k_;
              continue;
            }
            Scalar* line = chan + iy * in_.w;
            for (int kx = 0; kx < k_; ++kx, ++row) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix >= 0 && ix < in_.w) line[ix] += col[row];
            }
          }
        }
      }
    }
  }

  Shape3 in_{}, out_{};
  int out_c_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
  ParamTensor<Scalar> weight_, bias_;
  Mat<Scalar> x_;
};

template <class Scalar>
class BatchNorm2d {
 public:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm2d() = default;
  BatchNorm2d(std::string name, Shape3 shape) : shape_(shape) {
    gamma_.resize(name + ".gamma", {shape.c});
    beta_.resize(name + ".beta", {shape.c});
    gamma_.value.setOnes();
    running_mean_ = {name + ".running_mean", Vec<Scalar>::Zero(shape.c)};
    running_var_ = {name + ".running_var", Vec<Scalar>::Ones(shape.c)};
  }

  Shape3 shape() const { return shape_; }

  Mat<Scalar> forward(const Mat<Scalar>& x, bool train) {
    if (x.rows() != shape_.size()) throw ContractError("BatchNorm2d: input shape mismatch");
    train_ = train;
    const int plane = shape_.h * shape_.w;
    const long n = x.cols();
    xhat_.resize(x.rows(), n);
    inv_std_.resize(shape_.c);
    Mat<Scalar> y(x.rows(), n);
    for (int c = 0; c < shape_.c; ++c) {
      auto xc = x.middleRows(c * plane, plane);
      Scalar mu, var;
      if (train) {
        const Scalar count = static_cast<Scalar>(plane * n);
        mu = xc.sum() / count;
        var = (xc.array() - mu).square().sum() / count;
        running_mean_.value[c] = static_cast<Scalar>((1.0 - kMomentum) * running_mean_.value[c] +
                                                     kMomentum * mu);
        running_var_.value[c] = static_cast<Scalar>((1.0 - kMomentum) * running_var_.value[c] +
                                                    kMomentum * var);
      } else {
        mu = running_mean_.value[c];
        var = running_var_.value[c];
      }
      const Scalar inv = Scalar(1) / std::sqrt(var + static_cast<Scalar>(kEps));
      inv_std_[c] = inv;
      xhat_.middleRows(c * plane, plane) = (xc.array() - mu).matrix() * inv;
      y.middleRows(c * plane, plane) =
          (xhat_.middleRows(c * plane, plane).array() * gamma_.value[c] + beta_.value[c]).matrix();
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, bool want_dx, bool accum_param_grads) {
    if (dy.rows() != shape_.size() || dy.cols() != xhat_.cols())
      throw ContractError("BatchNorm2d: gradient shape mismatch");
    const int plane = shape_.h * shape_.w;
    const long n = dy.cols();
    Mat<Scalar> dx;
    if (want_dx) dx.resize(dy.rows(), n);
    for (int c = 0; c < shape_.c; ++c) {
      auto dyc = dy.middleRows(c * plane, plane);
      auto xh = xhat_.middleRows(c * plane, plane);
      const Scalar sum_dy = dyc.sum();
      const Scalar sum_dy_xhat = (dyc.array() * xh.array()).sum();
      if (accum_param_grads) {
        gamma_.grad[c] += sum_dy_xhat;
        beta_.grad[c] += sum_dy;
      }
      if (want_dx) {
        const Scalar scale = gamma_.value[c] * inv_std_[c];
        if (train_) {
          const Scalar count = static_cast<Scalar>(plane * n);
          dx.middleRows(c * plane, plane) =
              (scale * (dyc.array() - sum_dy / count - xh.array() * (sum_dy_xhat / count)))
                  .matrix();
        } else {
          dx.middleRows(c * plane, plane) = scale * dyc;
        }
      }
    }
    return dx;
  }

  std::vector<ParamTensor<Scalar>*> params() { return {&gamma_, &beta_}; }
  std::vector<BufferTensor<Scalar>*> buffers() { return {&running_mean_, &running_var_}; }

 private:
  Shape3 shape_{};
  ParamTensor<Scalar> gamma_, beta_;
  BufferTensor<Scalar> running_mean_, running_var_;
  Mat<Scalar> xhat_;
  Vec<Scalar> inv_std_;
  bool train_ = false;
};

template <class Scalar>
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, int in, int out) : in_(in), out_(out) {
    weight_.resize(name + ".weight", {out, in});
    bias_.resize(name + ".bias", {out});
  }

  void init(Rng& rng) {
    const double std = std::sqrt(2.0 / in_);
    for (long i = 0; i < weight_.value.size(); ++i)
      weight_.value[i] = static_cast<Scalar>(normal01(rng) * std);
    bias_.value.setZero();
  }

  Mat<Scalar> forward(const Mat<Scalar>& x) {
    if (x.rows() != in_) throw ContractError("Linear: input shape mismatch");
    x_ = x;
    Eigen::Map<const Mat<Scalar>> w(weight_.value.data(), out_, in_);
    Mat<Scalar> y = w * x;
    y.colwise() += bias_.value;
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, bool want_dx, bool accum_param_grads) {
    Eigen::Map<const Mat<Scalar>> w(weight_.value.data(), out_, in_);
    if (accum_param_grads) {
      Eigen::Map<Mat<Scalar>> dw(weight_.grad.data(), out_, in_);
      dw.noalias() += dy * x_.transpose();
      bias_.grad += dy.rowwise().sum();
    }
    if (!want_dx) return {};
    return w.transpose() * dy;
  }

  std::vector<ParamTensor<Scalar>*> params() { return {&weight_, &bias_}; }

 private:
  int in_ = 0, out_ = 0;
  ParamTensor<Scalar> weight_, bias_;
  Mat<Scalar> x_;
};

template <class Scalar>
class Relu {
 public:
  Mat<Scalar> forward(const Mat<Scalar>& x) {
    y_ = x.cwiseMax(Scalar(0));
    return y_;
  }
  Mat<Scalar> backward(const Mat<Scalar>& dy) const {
    return (y_.array() > Scalar(0)).template cast<Scalar>().matrix().cwiseProduct(dy);
  }

 private:
  Mat<Scalar> y_;
};

template <class Scalar>
class Tanh {
 public:
  Mat<Scalar> forward(const Mat<Scalar>& x) {
    y_ = x.array().tanh().matrix();
    return y_;
  }
  Mat<Scalar> backward(const Mat<Scalar>& dy) const {
    return ((Scalar(1) - y_.array().square()) * dy.array()).matrix();
  }

 private:
  Mat<Scalar> y_;
};

// Mean over the spatial plane, per channel: (c*h*w) x N -> c x N.
template <class Scalar>
class GlobalAvgPool {
 public:
  explicit GlobalAvgPool(Shape3 in = {}) : in_(in) {}

  Mat<Scalar> forward(const Mat<Scalar>& x) {
    const int plane = in_.h * in_.w;
    Mat<Scalar> y(in_.c, x.cols());
    for (int c = 0; c < in_.c; ++c)
      y.row(c) = x.middleRows(c * plane, plane).colwise().mean();
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy) const {
    const int plane = in_.h * in_.w;
    Mat<Scalar> dx(in_.size(), dy.cols());
    const Scalar inv = Scalar(1) / static_cast<Scalar>(plane);
    for (int c = 0; c < in_.c; ++c)
      dx.middleRows(c * plane, plane) = (dy.row(c) * inv).colwise().replicate(plane);
    return dx;
  }

 private:
  Shape3 in_{};
};

// Nearest-neighbour 2x upsampling.
template <class Scalar>
class Upsample2x {
 public:
  explicit Upsample2x(Shape3 in = {}) : in_(in), out_{in.c, in.h * 2, in.w * 2} {}

  Shape3 out_shape() const { return out_; }

  Mat<Scalar> forward(const Mat<Scalar>& x) const {
    const int ip = in_.h * in_.w;
    const int op = out_.h * out_.w;
    Mat<Scalar> y(out_.size(), x.cols());
    for (long s = 0; s < x.cols(); ++s) {
      const Scalar* src = x.col(s).data();
      Scalar* dst = y.col(s).data();
      for (int c = 0; c < in_.c; ++c) {
        for (int iy = 0; iy < out_.h; ++iy) {
          for (int ix = 0; ix < out_.w; ++ix) {
            dst[c * op + iy * out_.w + ix] = src[c * ip + (iy / 2) * in_.w + (ix / 2)];
          }
        }
      }
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy) const {
    const int ip = in_.h * in_.w;
    const int op = out_.h * out_.w;
    Mat<Scalar> dx = Mat<Scalar>::Zero(in_.size(), dy.cols());
    for (long s = 0; s < dy.cols(); ++s) {
      const Scalar* src = dy.col(s).data();
      Scalar* dst = dx.col(s).data();
      for (int c = 0; c < in_.c; ++c) {
        for (int iy = 0; iy < out_.h; ++iy) {
          for (int ix = 0; ix < out_.w; ++ix) {
            dst[c * ip + (iy / 2) * in_.w + (ix / 2)] += src[c * op + iy * out_.w + ix];
          }
        }
      }
    }
    return dx;
  }

 private:
  Shape3 in_{}, out_{};
};

}  // namespace rbd::nn
