#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rbd/nn/param.hpp"

namespace rbd::nn {

// Checkpoint file: 8-byte magic, a JSON manifest (names, shapes, dtype,
// phase tag), then the raw little-endian parameter payload.  Round-trips
// bit-exactly for the scalar type it was written with.

namespace detail {
inline constexpr char kMagic[8] = {'R', 'B', 'D', 'C', 'K', 'P', 'T', '1'};

template <class Scalar>
const char* dtype_name() {
  if constexpr (sizeof(Scalar) == 4)
    return "f32";
  else
    return "f64";
}
}  // namespace detail

template <class Scalar>
void save_checkpoint(const ParameterSnapshot<Scalar>& snap, const std::filesystem::path& path,
                     const nlohmann::json& extra_metadata = {}) {
  nlohmann::json manifest;
  manifest["dtype"] = detail::dtype_name<Scalar>();
  manifest["phase"] = snap.phase;
  manifest["step"] = snap.step;
  if (!extra_metadata.is_null()) manifest["metadata"] = extra_metadata;
  auto describe = [](const std::vector<SnapshotTensor<Scalar>>& ts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : ts)
      arr.push_back({{"name", t.name}, {"shape", t.shape}, {"len", t.value.size()}});
    return arr;
  };
  manifest["tensors"] = describe(snap.tensors);
  manifest["buffers"] = describe(snap.buffers);
  const std::string mjson = manifest.dump();

  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("save_checkpoint: cannot open " + path.string());
  out.write(detail::kMagic, 8);
  const std::uint64_t mlen = mjson.size();
  out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  out.write(mjson.data(), static_cast<std::streamsize>(mlen));
  auto dump = [&](const std::vector<SnapshotTensor<Scalar>>& ts) {
    for (const auto& t : ts)
      out.write(reinterpret_cast<const char*>(t.value.data()),
                static_cast<std::streamsize>(t.value.size() * sizeof(Scalar)));
  };
  dump(snap.tensors);
  dump(snap.buffers);
  if (!out) throw LoadError("save_checkpoint: write failed for " + path.string());
}

template <class Scalar>
ParameterSnapshot<Scalar> load_checkpoint(const std::filesystem::path& path,
                                          nlohmann::json* metadata_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("load_checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kMagic, 8) != 0)
    throw CorruptDataError("load_checkpoint: bad magic in " + path.string());
  std::uint64_t mlen = 0;
  in.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
  std::string mjson(mlen, '\0');
  in.read(mjson.data(), static_cast<std::streamsize>(mlen));
  if (!in) throw CorruptDataError("load_checkpoint: truncated manifest in " + path.string());
  nlohmann::json manifest = nlohmann::json::parse(mjson);
  if (manifest.at("dtype").get<std::string>() != detail::dtype_name<Scalar>())
    throw ContractError("load_checkpoint: dtype mismatch in " + path.string());

  ParameterSnapshot<Scalar> snap;
  snap.phase = manifest.value("phase", std::string{});
  snap.step = manifest.value("step", 0L);
  if (metadata_out && manifest.contains("metadata")) *metadata_out = manifest["metadata"];
  auto read_group = [&](const nlohmann::json& arr) {
    std::vector<SnapshotTensor<Scalar>> ts;
    for (const auto& e : arr) {
      SnapshotTensor<Scalar> t;
      t.name = e.at("name").get<std::string>();
      t.shape = e.at("shape").get<std::vector<int>>();
      const long len = e.at("len").get<long>();
      t.value.resize(len);
      in.read(reinterpret_cast<char*>(t.value.data()),
              static_cast<std::streamsize>(len * sizeof(Scalar)));
      ts.push_back(std::move(t));
    }
    return ts;
  };
  snap.tensors = read_group(manifest.at("tensors"));
  snap.buffers = read_group(manifest.at("buffers"));
  if (!in) throw CorruptDataError("load_checkpoint: truncated payload in " + path.string());
  return snap;
}

}  // namespace rbd::nn
