#pragma once

#include "rbd/nn/loss.hpp"
#include "rbd/nn/param.hpp"

namespace rbd::nn {

struct SgdOptions {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
};

// Momentum SGD over an ordered parameter list.  `first_tensor` restricts the
// update to a trailing suffix of the list; everything before it (values and
// velocities) is left untouched.
template <class Scalar>
class Sgd {
 public:
  void step(std::vector<ParamTensor<Scalar>*> params, const SgdOptions& opt,
            std::size_t first_tensor = 0) {
    if (velocity_.size() != params.size()) {
      velocity_.assign(params.size(), {});
      for (std::size_t i = 0; i < params.size(); ++i)
        velocity_[i] = Vec<Scalar>::Zero(params[i]->size());
    }
    if (first_tensor > params.size()) throw ContractError("Sgd: mask start out of range");
    for (std::size_t i = first_tensor; i < params.size(); ++i) {
      ParamTensor<Scalar>& p = *params[i];
      Vec<Scalar>& v = velocity_[i];
      if (opt.weight_decay != 0.0) {
        v = static_cast<Scalar>(opt.momentum) * v + p.grad +
            static_cast<Scalar>(opt.weight_decay) * p.value;
      } else {
        v = static_cast<Scalar>(opt.momentum) * v + p.grad;
      }
      p.value -= static_cast<Scalar>(opt.lr) * v;
    }
  }

  void reset() { velocity_.clear(); }

 private:
  std::vector<Vec<Scalar>> velocity_;
};

// Step-decay schedule: x0.1 at 50% and 75% of the run.
inline double scheduled_lr(double base, int epoch, int total_epochs) {
  double lr = base;
  if (epoch >= total_epochs / 2) lr *= 0.1;
  if (epoch >= (3 * total_epochs) / 4) lr *= 0.1;
  return lr;
}

// One plain (momentum-free) SGD step on a batch: forward, cross-entropy,
// backward, update.  Updates only the tensor suffix starting at
// `first_tensor`.  Returns the batch loss.
template <class Scalar, class Model>
Scalar sgd_step(Model& model, const Mat<Scalar>& images, const std::vector<int>& labels,
                double learning_rate, std::size_t first_tensor = 0, bool train_mode = true) {
  if (images.cols() == 0) throw ContractError("sgd_step: empty batch");
  if (learning_rate < 0) throw ContractError("sgd_step: negative learning rate");
  zero_grads<Scalar>(model);
  Mat<Scalar> logits = model.forward(images, train_mode);
  CeResult<Scalar> ce = cross_entropy(logits, labels);
  model.backward(ce.dlogits, false, true);
  auto params = model.params();
  if (first_tensor > params.size()) throw ContractError("sgd_step: mask start out of range");
  for (std::size_t i = first_tensor; i < params.size(); ++i)
    params[i]->value -= static_cast<Scalar>(learning_rate) * params[i]->grad;
  return ce.loss;
}

}  // namespace rbd::nn
