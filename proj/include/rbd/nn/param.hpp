#pragma once

#include <string>
#include <vector>

#include "rbd/common.hpp"

namespace rbd::nn {

// One trainable tensor, stored flat; layout is owned by the layer.
template <class Scalar>
struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  Vec<Scalar> value;
  Vec<Scalar> grad;

  void resize(std::string n, std::vector<int> s) {
    name = std::move(n);
    shape = std::move(s);
    long total = 1;
    for (int d : shape) total *= d;
    value = Vec<Scalar>::Zero(total);
    grad = Vec<Scalar>::Zero(total);
  }

  long size() const { return value.size(); }
};

// Non-trainable state that must round-trip through snapshots (e.g. BN running stats).
template <class Scalar>
struct BufferTensor {
  std::string name;
  Vec<Scalar> value;
};

template <class Scalar>
struct SnapshotTensor {
  std::string name;
  std::vector<int> shape;
  Vec<Scalar> value;
};

// Full copy of a model's state plus provenance metadata.
template <class Scalar>
struct ParameterSnapshot {
  std::string phase;  // clean | backdoored | unlearned | generator | <free-form>
  long step = 0;
  std::vector<SnapshotTensor<Scalar>> tensors;
  std::vector<SnapshotTensor<Scalar>> buffers;

  long parameter_count() const {
    long n = 0;
    for (const auto& t : tensors) n += t.value.size();
    return n;
  }
};

// Model here means anything exposing params() and buffers().
template <class Scalar, class Model>
ParameterSnapshot<Scalar> snapshot(const Model& model, std::string phase = {}, long step = 0) {
  ParameterSnapshot<Scalar> snap;
  snap.phase = std::move(phase);
  snap.step = step;
  for (const ParamTensor<Scalar>* p : model.params()) {
    snap.tensors.push_back({p->name, p->shape, p->value});
  }
  for (const BufferTensor<Scalar>* b : model.buffers()) {
    snap.buffers.push_back({b->name, {static_cast<int>(b->value.size())}, b->value});
  }
  return snap;
}

template <class Scalar, class Model>
void restore(Model& model, const ParameterSnapshot<Scalar>& snap) {
  auto params = model.params();
  if (params.size() != snap.tensors.size())
    throw ContractError("restore: tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != snap.tensors[i].name || params[i]->shape != snap.tensors[i].shape)
      throw ContractError("restore: tensor " + snap.tensors[i].name + " does not match model");
    params[i]->value = snap.tensors[i].value;
  }
  auto bufs = model.buffers();
  if (bufs.size() != snap.buffers.size()) throw ContractError("restore: buffer count mismatch");
  for (std::size_t i = 0; i < bufs.size(); ++i) {
    if (bufs[i]->name != snap.buffers[i].name ||
        bufs[i]->value.size() != snap.buffers[i].value.size())
      throw ContractError("restore: buffer " + snap.buffers[i].name + " does not match model");
    bufs[i]->value = snap.buffers[i].value;
  }
}

template <class Scalar, class Model>
void zero_grads(Model& model) {
  for (ParamTensor<Scalar>* p : model.params()) p->grad.setZero();
}

// All parameter gradients concatenated in params() order.
template <class Scalar, class Model>
Vec<Scalar> flat_grad(const Model& model) {
  long total = 0;
  for (const ParamTensor<Scalar>* p : model.params()) total += p->size();
  Vec<Scalar> out(total);
  long at = 0;
  for (const ParamTensor<Scalar>* p : model.params()) {
    out.segment(at, p->size()) = p->grad;
    at += p->size();
  }
  return out;
}

template <class Scalar, class Model>
Vec<Scalar> flat_params(const Model& model) {
  long total = 0;
  for (const ParamTensor<Scalar>* p : model.params()) total += p->size();
  Vec<Scalar> out(total);
  long at = 0;
  for (const ParamTensor<Scalar>* p : model.params()) {
    out.segment(at, p->size()) = p->value;
    at += p->size();
  }
  return out;
}

template <class Scalar, class Model>
void set_flat_params(Model& model, const Vec<Scalar>& flat) {
  long at = 0;
  for (ParamTensor<Scalar>* p : model.params()) {
    if (at + p->size() > flat.size()) throw ContractError("set_flat_params: size mismatch");
    p->value = flat.segment(at, p->size());
    at += p->size();
  }
  if (at != flat.size()) throw ContractError("set_flat_params: size mismatch");
}

}  // namespace rbd::nn
