#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rbd/dataset.hpp"

namespace rbd {

// Deterministic poison/forget index sets.  poison_indices is a seeded shuffle
// of the target-class indices cut to round(rho_p * |train|); forget_indices
// is a prefix of that order, so the forget set grows monotonically with
// rho_f_count.
struct DataPartition {
  int target_label = 0;
  std::vector<long> poison_indices;
  std::vector<long> forget_indices;
  double rho_p = 0.0;
  long rho_f_count = 0;
  std::uint64_t seed = 0;
  long train_size = 0;

  bool is_poisoned(long idx) const {
    return std::binary_search(sorted_poison_.begin(), sorted_poison_.end(), idx);
  }

  const std::vector<long>& sorted_poison() const { return sorted_poison_; }

  void finalize() {
    sorted_poison_ = poison_indices;
    std::sort(sorted_poison_.begin(), sorted_poison_.end());
  }

 private:
  std::vector<long> sorted_poison_;
};

template <class Scalar>
DataPartition make_partition(const LabeledDataset<Scalar>& dataset, int target_label,
                             double rho_p, long rho_f_count, std::uint64_t seed) {
  if (target_label < 0 || target_label >= dataset.num_classes)
    throw ContractError("make_partition: target label out of range");
  if (rho_p < 0.0 || rho_p > 1.0) throw ContractError("make_partition: rho_p outside [0,1]");
  std::vector<long> target_idx;
  for (long i = 0; i < dataset.size(); ++i)
    if (dataset.labels[i] == target_label) target_idx.push_back(i);

  const long poison_count = std::lround(rho_p * static_cast<double>(dataset.size()));
  if (poison_count > static_cast<long>(target_idx.size()))
    throw CapacityError("make_partition: poison set (" + std::to_string(poison_count) +
                        ") exceeds target-class samples (" + std::to_string(target_idx.size()) +
                        ")");
  if (rho_f_count > poison_count)
    throw NestingError("make_partition: rho_f_count exceeds poison set size");
  if (rho_f_count < 0) throw ContractError("make_partition: negative rho_f_count");

  Rng rng(seed);
  seeded_shuffle(target_idx, rng);

  DataPartition part;
  part.target_label = target_label;
  part.rho_p = rho_p;
  part.rho_f_count = rho_f_count;
  part.seed = seed;
  part.train_size = dataset.size();
  part.poison_indices.assign(target_idx.begin(), target_idx.begin() + poison_count);
  part.forget_indices.assign(part.poison_indices.begin(),
                             part.poison_indices.begin() + rho_f_count);
  part.finalize();
  return part;
}

// Audit manifest with sorted index lists; byte-identical for equal inputs.
inline nlohmann::json partition_manifest(const DataPartition& p) {
  std::vector<long> sp = p.poison_indices;
  std::vector<long> sf = p.forget_indices;
  std::sort(sp.begin(), sp.end());
  std::sort(sf.begin(), sf.end());
  return nlohmann::json{{"target_label", p.target_label},
                        {"rho_p", p.rho_p},
                        {"rho_f_count", p.rho_f_count},
                        {"seed", p.seed},
                        {"train_size", p.train_size},
                        {"poison_indices", sp},
                        {"forget_indices", sf}};
}

inline void save_partition(const DataPartition& p, const std::filesystem::path& path,
                           const nlohmann::json& extra = {}) {
  nlohmann::json j = partition_manifest(p);
  // The shuffle-order lists are what the pipeline actually consumes.
  j["poison_order"] = p.poison_indices;
  if (!extra.is_null()) j["metadata"] = extra;
  std::ofstream out(path);
  if (!out) throw LoadError("save_partition: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

inline DataPartition load_partition(const std::filesystem::path& path,
                                    nlohmann::json* extra = nullptr) {
  std::ifstream in(path);
  if (!in) throw LoadError("load_partition: cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  DataPartition p;
  p.target_label = j.at("target_label").get<int>();
  p.rho_p = j.at("rho_p").get<double>();
  p.rho_f_count = j.at("rho_f_count").get<long>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.train_size = j.at("train_size").get<long>();
  p.poison_indices = j.at("poison_order").get<std::vector<long>>();
  p.forget_indices.assign(p.poison_indices.begin(),
                          p.poison_indices.begin() + p.rho_f_count);
  p.finalize();
  if (extra && j.contains("metadata")) *extra = j["metadata"];
  return p;
}

}  // namespace rbd
