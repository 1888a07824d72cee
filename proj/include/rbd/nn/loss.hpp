#pragma once

#include <vector>

#include "rbd/common.hpp"

namespace rbd::nn {

// Column-wise softmax.
template <class Scalar>
Mat<Scalar> softmax(const Mat<Scalar>& logits) {
  Mat<Scalar> p(logits.rows(), logits.cols());
  for (long j = 0; j < logits.cols(); ++j) {
    const Scalar m = logits.col(j).maxCoeff();
    p.col(j) = (logits.col(j).array() - m).exp();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

template <class Scalar>
struct CeResult {
  Scalar loss = 0;        // mean over the batch
  Mat<Scalar> dlogits;    // gradient of the mean loss
};

// Mean softmax cross-entropy against integer labels.
template <class Scalar>
CeResult<Scalar> cross_entropy(const Mat<Scalar>& logits, const std::vector<int>& labels) {
  if (logits.cols() != static_cast<long>(labels.size()))
    throw ContractError("cross_entropy: batch size mismatch");
  if (labels.empty()) throw ContractError("cross_entropy: empty batch");
  const long n = logits.cols();
  CeResult<Scalar> r;
  r.dlogits.resize(logits.rows(), n);
  Scalar total = 0;
  for (long j = 0; j < n; ++j) {
    const int y = labels[j];
    if (y < 0 || y >= logits.rows()) throw ContractError("cross_entropy: label out of range");
    const Scalar m = logits.col(j).maxCoeff();
    Vec<Scalar> e = (logits.col(j).array() - m).exp();
    const Scalar z = e.sum();
    total += -(logits(y, j) - m - std::log(z));
    r.dlogits.col(j) = e / z;
    r.dlogits(y, j) -= Scalar(1);
  }
  r.dlogits /= static_cast<Scalar>(n);
  r.loss = total / static_cast<Scalar>(n);
  if (!std::isfinite(static_cast<double>(r.loss)))
    throw NumericalFault("cross_entropy: non-finite loss");
  return r;
}

// Same loss against one constant label for the whole batch.
template <class Scalar>
CeResult<Scalar> cross_entropy_constant(const Mat<Scalar>& logits, int target) {
  if (target < 0 || target >= logits.rows())
    throw ContractError("cross_entropy_constant: target out of range");
  return cross_entropy(logits, std::vector<int>(logits.cols(), target));
}

template <class Scalar>
std::vector<int> argmax_labels(const Mat<Scalar>& logits) {
  std::vector<int> out(logits.cols());
  for (long j = 0; j < logits.cols(); ++j) {
    Eigen::Index idx;
    logits.col(j).maxCoeff(&idx);
    out[j] = static_cast<int>(idx);
  }
  return out;
}

}  // namespace rbd::nn
