#pragma once

#include "rbd/partition.hpp"
#include "rbd/trigger.hpp"

namespace rbd {

// Mixed training set D_b = (D \ P) u P': poisoned entries carry G(x) with the
// original clean label.
template <class Scalar>
struct MixedDataset {
  LabeledDataset<Scalar> data;
  std::vector<char> is_poisoned;
  std::string provenance;  // partition/generator snapshot tag

  long poison_count() const {
    long n = 0;
    for (char f : is_poisoned) n += f != 0;
    return n;
  }
};

template <class Scalar>
MixedDataset<Scalar> build_poisoned_set(const LabeledDataset<Scalar>& dataset,
                                        const DataPartition& partition,
                                        nn::NoiseGenerator<Scalar>& generator,
                                        TriggerApplier<Scalar>& trigger,
                                        std::string provenance = {}) {
  MixedDataset<Scalar> mixed;
  mixed.data = dataset;
  mixed.is_poisoned.assign(dataset.size(), 0);
  mixed.provenance = std::move(provenance);
  const long n = dataset.size();
  const long batch = 256;
  const auto& order = partition.poison_indices;
  for (long at = 0; at < static_cast<long>(order.size()); at += batch) {
    const long take = std::min<long>(batch, static_cast<long>(order.size()) - at);
    Mat<Scalar> x(dataset.images.rows(), take);
    for (long j = 0; j < take; ++j) {
      const long idx = order[at + j];
      if (idx < 0 || idx >= n) throw IndexError("build_poisoned_set: index out of range");
      x.col(j) = dataset.images.col(idx);
    }
    Mat<Scalar> gx = trigger.apply_eval(generator, x);
    for (long j = 0; j < take; ++j) {
      const long idx = order[at + j];
      mixed.data.images.col(idx) = gx.col(j);
      mixed.is_poisoned[idx] = 1;
    }
  }
  return mixed;
}

// Triggered forget set exactly as stored in the mixed dataset.
template <class Scalar>
void forget_batch(const MixedDataset<Scalar>& mixed, const DataPartition& partition,
                  Mat<Scalar>& images, std::vector<int>& labels) {
  const long nf = static_cast<long>(partition.forget_indices.size());
  if (nf == 0) throw ContractError("forget_batch: empty forget set");
  images.resize(mixed.data.images.rows(), nf);
  labels.resize(nf);
  for (long j = 0; j < nf; ++j) {
    const long idx = partition.forget_indices[j];
    if (idx < 0 || idx >= mixed.data.size()) throw IndexError("forget_batch: index out of range");
    images.col(j) = mixed.data.images.col(idx);
    labels[j] = mixed.data.labels[idx];
  }
}

}  // namespace rbd
