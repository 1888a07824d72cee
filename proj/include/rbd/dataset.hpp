#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "rbd/common.hpp"

namespace rbd {

struct AugmentFlags {
  bool horizontal_flip = true;
  bool rotation = true;
  bool crop = true;
};

struct DatasetSpec {
  std::string name = "synthetic32";  // synthetic32 | cifar10
  std::string data_dir = "data";
  Shape3 image_shape{3, 32, 32};
  int num_classes = 10;
  long train_limit = -1;  // <0 = full split; 0 is a degenerate (rejected) request
  long test_limit = -1;
  std::vector<double> mean{0.5, 0.5, 0.5};
  std::vector<double> std{0.25, 0.25, 0.25};
  AugmentFlags augment;
  std::uint64_t synth_seed = 42;  // structural seed for the synthetic classes

  void validate() const {
    if (image_shape.c <= 0 || image_shape.h <= 0 || image_shape.w <= 0)
      throw ConfigError("DatasetSpec: image_shape dimensions must be positive");
    if (num_classes < 2) throw ConfigError("DatasetSpec: num_classes must be >= 2");
    if (mean.size() != static_cast<std::size_t>(image_shape.c) || std.size() != mean.size())
      throw ConfigError("DatasetSpec: normalization size mismatch");
    for (double s : std)
      if (s <= 0) throw ConfigError("DatasetSpec: std must be positive");
  }
};

// Normalized images, one column per sample (channel-major rows).
template <class Scalar>
struct LabeledDataset {
  Shape3 shape{};
  int num_classes = 0;
  Mat<Scalar> images;
  std::vector<int> labels;
  Vec<Scalar> channel_mean, channel_std;

  long size() const { return images.cols(); }

  // Valid normalized pixel range for channel c (pixels live in [0,1] pre-normalization).
  Scalar lo(int c) const { return (Scalar(0) - channel_mean[c]) / channel_std[c]; }
  Scalar hi(int c) const { return (Scalar(1) - channel_mean[c]) / channel_std[c]; }
};

template <class Scalar>
struct DataSplits {
  LabeledDataset<Scalar> train;
  LabeledDataset<Scalar> test;
};

namespace detail {

// Class-stratified prefix truncation in deterministic (round-robin by class,
// original order within class) fashion.
template <class Scalar>
LabeledDataset<Scalar> stratified_limit(const LabeledDataset<Scalar>& ds, long limit) {
  if (limit <= 0) throw LoadError("train_limit/test_limit produced an empty split");
  if (limit > ds.size()) throw LoadError("limit exceeds split size");
  if (limit == ds.size()) return ds;
  std::vector<std::vector<long>> per_class(ds.num_classes);
  for (long i = 0; i < ds.size(); ++i) per_class[ds.labels[i]].push_back(i);
  std::vector<long> picked;
  picked.reserve(limit);
  for (std::size_t round = 0; static_cast<long>(picked.size()) < limit; ++round) {
    bool any = false;
    for (int c = 0; c < ds.num_classes && static_cast<long>(picked.size()) < limit; ++c) {
      if (round < per_class[c].size()) {
        picked.push_back(per_class[c][round]);
        any = true;
      }
    }
    if (!any) break;
  }
  std::sort(picked.begin(), picked.end());
  LabeledDataset<Scalar> out;
  out.shape = ds.shape;
  out.num_classes = ds.num_classes;
  out.channel_mean = ds.channel_mean;
  out.channel_std = ds.channel_std;
  out.images.resize(ds.images.rows(), static_cast<long>(picked.size()));
  out.labels.resize(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    out.images.col(static_cast<long>(i)) = ds.images.col(picked[i]);
    out.labels[i] = ds.labels[picked[i]];
  }
  return out;
}

template <class Scalar>
void normalize_in_place(LabeledDataset<Scalar>& ds) {
  const int plane = ds.shape.h * ds.shape.w;
  for (int c = 0; c < ds.shape.c; ++c) {
    auto rows = ds.images.middleRows(c * plane, plane);
    rows = ((rows.array() - ds.channel_mean[c]) / ds.channel_std[c]).matrix();
  }
}

// One CIFAR-format binary shard: records of [label u8][R plane][G plane][B plane].
template <class Scalar>
void read_cifar_shard(const std::filesystem::path& file, const DatasetSpec& spec,
                      std::vector<int>& labels, std::vector<std::vector<Scalar>>& pixels) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("dataset shard missing: " + file.string());
  const long record = 1 + spec.image_shape.size();
  std::vector<unsigned char> buf(record);
  while (in.read(reinterpret_cast<char*>(buf.data()), record)) {
    const int label = buf[0];
    if (label < 0 || label >= spec.num_classes)
      throw CorruptDataError("label out of range in " + file.string());
    labels.push_back(label);
    std::vector<Scalar> img(spec.image_shape.size());
    for (long i = 0; i < spec.image_shape.size(); ++i)
      img[i] = static_cast<Scalar>(buf[1 + i]) / Scalar(255);
    pixels.push_back(std::move(img));
  }
}

template <class Scalar>
LabeledDataset<Scalar> assemble(const DatasetSpec& spec,
                                std::vector<std::vector<Scalar>>&& pixels,
                                std::vector<int>&& labels) {
  LabeledDataset<Scalar> ds;
  ds.shape = spec.image_shape;
  ds.num_classes = spec.num_classes;
  ds.channel_mean.resize(spec.image_shape.c);
  ds.channel_std.resize(spec.image_shape.c);
  for (int c = 0; c < spec.image_shape.c; ++c) {
    ds.channel_mean[c] = static_cast<Scalar>(spec.mean[c]);
    ds.channel_std[c] = static_cast<Scalar>(spec.std[c]);
  }
  ds.labels = std::move(labels);
  ds.images.resize(spec.image_shape.size(), static_cast<long>(pixels.size()));
  for (std::size_t i = 0; i < pixels.size(); ++i)
    ds.images.col(static_cast<long>(i)) =
        Eigen::Map<const Vec<Scalar>>(pixels[i].data(), spec.image_shape.size());
  normalize_in_place(ds);
  return ds;
}

// Smooth class prototypes: a few low-frequency cosine modes per class, fixed
// by the structural seed so train and test share the same class geometry.
template <class Scalar>
std::vector<Vec<Scalar>> synthetic_prototypes(const DatasetSpec& spec) {
  Rng rng(spec.synth_seed);
  const Shape3 sh = spec.image_shape;
  std::vector<Vec<Scalar>> protos(spec.num_classes);
  for (int cls = 0; cls < spec.num_classes; ++cls) {
    Vec<Scalar> p = Vec<Scalar>::Zero(sh.size());
    const int modes = 5;
    for (int c = 0; c < sh.c; ++c) {
      for (int m = 0; m < modes; ++m) {
        const double fu = uniform_in(rng, 0.5, 3.0);
        const double fv = uniform_in(rng, 0.5, 3.0);
        const double phase_u = uniform_in(rng, 0.0, 6.28318);
        const double phase_v = uniform_in(rng, 0.0, 6.28318);
        const double amp = uniform_in(rng, 0.25, 0.6);
        for (int y = 0; y < sh.h; ++y) {
          for (int x = 0; x < sh.w; ++x) {
            const double v = amp * std::cos(fu * 6.28318 * y / sh.h + phase_u) *
                             std::cos(fv * 6.28318 * x / sh.w + phase_v);
            p[c * sh.h * sh.w + y * sh.w + x] += static_cast<Scalar>(v);
          }
        }
      }
    }
    protos[cls] = p;
  }
  return protos;
}

template <class Scalar>
LabeledDataset<Scalar> make_synthetic_split(const DatasetSpec& spec, long count,
                                            std::uint64_t split_seed,
                                            const std::vector<Vec<Scalar>>& protos) {
  Rng rng(split_seed);
  const Shape3 sh = spec.image_shape;
  const int plane = sh.h * sh.w;
  std::vector<std::vector<Scalar>> pixels;
  std::vector<int> labels;
  pixels.reserve(count);
  labels.reserve(count);
  for (long i = 0; i < count; ++i) {
    const int cls = static_cast<int>(i % spec.num_classes);
    const double gain = uniform_in(rng, 0.7, 1.3);
    const double bias = uniform_in(rng, -0.08, 0.08);
    const int shift_y = static_cast<int>(bounded(rng, 9)) - 4;
    const int shift_x = static_cast<int>(bounded(rng, 9)) - 4;
    std::vector<Scalar> img(sh.size());
    for (int c = 0; c < sh.c; ++c) {
      for (int y = 0; y < sh.h; ++y) {
        for (int x = 0; x < sh.w; ++x) {
          const int sy = (y + shift_y + sh.h) % sh.h;
          const int sx = (x + shift_x + sh.w) % sh.w;
          double v = 0.5 + gain * protos[cls][c * plane + sy * sh.w + sx] + bias;
          v += 0.10 * normal01(rng);
          v = std::clamp(v, 0.0, 1.0);
          // Byte quantization keeps the synthetic data CIFAR-binary exact.
          img[c * plane + y * sh.w + x] =
              static_cast<Scalar>(std::lround(v * 255.0)) / Scalar(255);
        }
      }
    }
    pixels.push_back(std::move(img));
    labels.push_back(cls);
  }
  return assemble<Scalar>(spec, std::move(pixels), std::move(labels));
}

}  // namespace detail

// Loads train/test splits per the spec.  "cifar10" reads the standard binary
// layout under <data_dir>/cifar-10-batches-bin; "synthetic32" generates the
// bundled deterministic stand-in of the same format.
template <class Scalar>
DataSplits<Scalar> load_dataset(const DatasetSpec& spec) {
  spec.validate();
  if (spec.train_limit == 0 || spec.test_limit == 0)
    throw LoadError("load_dataset: limit of 0 produces an empty split");
  DataSplits<Scalar> splits;
  if (spec.name == "cifar10") {
    const std::filesystem::path root = std::filesystem::path(spec.data_dir) /
                                       "cifar-10-batches-bin";
    std::vector<std::vector<Scalar>> px;
    std::vector<int> lb;
    for (int i = 1; i <= 5; ++i)
      detail::read_cifar_shard<Scalar>(root / ("data_batch_" + std::to_string(i) + ".bin"), spec,
                                       lb, px);
    splits.train = detail::assemble<Scalar>(spec, std::move(px), std::move(lb));
    std::vector<std::vector<Scalar>> tpx;
    std::vector<int> tlb;
    detail::read_cifar_shard<Scalar>(root / "test_batch.bin", spec, tlb, tpx);
    splits.test = detail::assemble<Scalar>(spec, std::move(tpx), std::move(tlb));
  } else if (spec.name == "synthetic32") {
    auto protos = detail::synthetic_prototypes<Scalar>(spec);
    const long train_n = 50000;
    const long test_n = 10000;
    if (spec.train_limit > train_n || spec.test_limit > test_n)
      throw LoadError("load_dataset: limit exceeds split size");
    // Synthetic splits are emitted class-stratified at the requested size.
    splits.train = detail::make_synthetic_split<Scalar>(
        spec, spec.train_limit > 0 ? spec.train_limit : train_n,
        derive_seed(spec.synth_seed, "train"), protos);
    splits.test = detail::make_synthetic_split<Scalar>(
        spec, spec.test_limit > 0 ? spec.test_limit : test_n,
        derive_seed(spec.synth_seed, "test"), protos);
    return splits;
  } else {
    throw ConfigError("load_dataset: unknown dataset '" + spec.name + "'");
  }
  if (spec.train_limit > 0)
    splits.train = detail::stratified_limit(splits.train, spec.train_limit);
  if (spec.test_limit > 0) splits.test = detail::stratified_limit(splits.test, spec.test_limit);
  return splits;
}

// Writes a dataset back out in the standard CIFAR binary record layout.
template <class Scalar>
void write_cifar_binary(const LabeledDataset<Scalar>& ds, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("write_cifar_binary: cannot open " + file.string());
  const int plane = ds.shape.h * ds.shape.w;
  for (long i = 0; i < ds.size(); ++i) {
    const unsigned char label = static_cast<unsigned char>(ds.labels[i]);
    out.put(static_cast<char>(label));
    for (int c = 0; c < ds.shape.c; ++c) {
      for (int p = 0; p < plane; ++p) {
        const double denorm = static_cast<double>(ds.images(c * plane + p, i)) *
                                  static_cast<double>(ds.channel_std[c]) +
                              static_cast<double>(ds.channel_mean[c]);
        const long byte = std::lround(std::clamp(denorm, 0.0, 1.0) * 255.0);
        out.put(static_cast<char>(static_cast<unsigned char>(byte)));
      }
    }
  }
}

}  // namespace rbd
