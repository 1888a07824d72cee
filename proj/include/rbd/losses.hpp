#pragma once

#include "rbd/nn/classifier.hpp"
#include "rbd/nn/loss.hpp"
#include "rbd/trigger.hpp"

namespace rbd {

struct LossWeights {
  double lambda_unlearn = 1.0;
  double lambda_vis = 0.02;
  double lambda_non_adv = 0.8;

  void validate() const {
    if (lambda_unlearn < 0 || lambda_vis < 0 || lambda_non_adv < 0)
      throw ContractError("LossWeights: weights must be >= 0");
  }
};

template <class Scalar>
struct LossBundle {
  Scalar attack = 0;
  Scalar unlearn = 0;
  Scalar visibility = 0;
  Scalar non_adv = 0;
  Scalar total = 0;
};

template <class Scalar>
LossBundle<Scalar> total_generator_loss(Scalar attack, Scalar unlearn, Scalar visibility,
                                        Scalar non_adv, const LossWeights& w) {
  w.validate();
  LossBundle<Scalar> b;
  b.attack = attack;
  b.unlearn = unlearn;
  b.visibility = visibility;
  b.non_adv = non_adv;
  b.total = attack + static_cast<Scalar>(w.lambda_unlearn) * unlearn +
            static_cast<Scalar>(w.lambda_vis) * visibility +
            static_cast<Scalar>(w.lambda_non_adv) * non_adv;
  return b;
}

// Mean cross-entropy of f(G(x)) against the constant target label.
template <class Scalar>
Scalar attack_loss(nn::PreActResNet<Scalar>& model_b, nn::NoiseGenerator<Scalar>& gen,
                   TriggerApplier<Scalar>& trigger, const Mat<Scalar>& x, int y_target,
                   double sigma) {
  Mat<Scalar> gx = trigger.apply(gen, x, sigma).triggered;
  return nn::cross_entropy_constant(model_b.forward(gx, false), y_target).loss;
}

// Mean cross-entropy of f(G(x)) against the ground-truth labels.
template <class Scalar>
Scalar unlearn_loss(nn::PreActResNet<Scalar>& model_u, nn::NoiseGenerator<Scalar>& gen,
                    TriggerApplier<Scalar>& trigger, const Mat<Scalar>& x,
                    const std::vector<int>& y, double sigma) {
  Mat<Scalar> gx = trigger.apply(gen, x, sigma).triggered;
  return nn::cross_entropy(model_u.forward(gx, false), y).loss;
}

// Mean per-image squared L2 of the scaled, mask-filtered noise (pre-blur).
template <class Scalar>
Scalar visibility_loss_from_noise(const Mat<Scalar>& filtered_noise, double eta) {
  if (filtered_noise.cols() == 0) throw ContractError("visibility_loss: empty batch");
  const Scalar e = static_cast<Scalar>(eta);
  return e * e * filtered_noise.squaredNorm() / static_cast<Scalar>(filtered_noise.cols());
}

template <class Scalar>
Scalar visibility_loss(nn::NoiseGenerator<Scalar>& gen, TriggerApplier<Scalar>& trigger,
                       const Mat<Scalar>& x, double sigma) {
  auto f = trigger.apply(gen, x, sigma);
  return visibility_loss_from_noise(f.noise, trigger.config().eta);
}

template <class Scalar>
Scalar non_adv_loss(nn::PreActResNet<Scalar>& model_clean, nn::NoiseGenerator<Scalar>& gen,
                    TriggerApplier<Scalar>& trigger, const Mat<Scalar>& x,
                    const std::vector<int>& y, double sigma) {
  Mat<Scalar> gx = trigger.apply(gen, x, sigma).triggered;
  return nn::cross_entropy(model_clean.forward(gx, false), y).loss;
}

// Everything the outer generator step needs from one batch: the four loss
// values plus each loss's flat gradient with respect to the generator
// parameters.  Models run in evaluation mode with gradient flow back through
// G(x); their own parameter gradients are untouched.
template <class Scalar>
struct GeneratorGrads {
  LossBundle<Scalar> losses;  // total filled in by the caller's weights
  Vec<Scalar> attack;
  Vec<Scalar> unlearn;
  Vec<Scalar> visibility;
  Vec<Scalar> non_adv;
};

template <class Scalar>
GeneratorGrads<Scalar> generator_loss_grads(nn::NoiseGenerator<Scalar>& gen,
                                            TriggerApplier<Scalar>& trigger,
                                            nn::PreActResNet<Scalar>& model_b,
                                            nn::PreActResNet<Scalar>& model_u,
                                            nn::PreActResNet<Scalar>& model_clean,
                                            const Mat<Scalar>& x, const std::vector<int>& y,
                                            int y_target, double sigma,
                                            const LossWeights& weights) {
  if (x.cols() == 0) throw ContractError("generator_loss_grads: empty batch");
  GeneratorGrads<Scalar> out;
  auto f = trigger.apply(gen, x, sigma);

  auto grad_through = [&](nn::PreActResNet<Scalar>& model, const nn::CeResult<Scalar>& ce) {
    Mat<Scalar> d_trig = model.backward(ce.dlogits, true, false);
    nn::zero_grads<Scalar>(gen);
    trigger.backward(gen, f, &d_trig);
    return nn::flat_grad<Scalar>(gen);
  };

  {
    auto ce = nn::cross_entropy_constant(model_b.forward(f.triggered, false), y_target);
    out.losses.attack = ce.loss;
    out.attack = grad_through(model_b, ce);
  }
  {
    auto ce = nn::cross_entropy(model_u.forward(f.triggered, false), y);
    out.losses.unlearn = ce.loss;
    out.unlearn = grad_through(model_u, ce);
  }
  {
    auto ce = nn::cross_entropy(model_clean.forward(f.triggered, false), y);
    out.losses.non_adv = ce.loss;
    out.non_adv = grad_through(model_clean, ce);
  }
  {
    out.losses.visibility = visibility_loss_from_noise(f.noise, trigger.config().eta);
    const Scalar e = static_cast<Scalar>(trigger.config().eta);
    Mat<Scalar> d_noise = (Scalar(2) * e * e / static_cast<Scalar>(x.cols())) * f.noise;
    nn::zero_grads<Scalar>(gen);
    trigger.backward(gen, f, nullptr, &d_noise);
    out.visibility = nn::flat_grad<Scalar>(gen);
  }
  out.losses = total_generator_loss(out.losses.attack, out.losses.unlearn,
                                    out.losses.visibility, out.losses.non_adv, weights);
  return out;
}

}  // namespace rbd
