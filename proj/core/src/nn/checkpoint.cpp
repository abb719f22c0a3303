#include "talkgen/nn/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace talkgen::nn {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'C', 'K', 'P', 'T', '0', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  TG_CHECK(static_cast<bool>(is), "checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const CheckpointMeta& meta) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  TG_CHECK(os.good(), "checkpoint: cannot open for write: ", path);
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, kVersion);
  write_pod(os, meta.step);
  write_pod(os, meta.config_digest);
  write_pod(os, static_cast<uint32_t>(store.entries().size()));
  for (const auto& e : store.entries()) {
    write_pod(os, static_cast<uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_pod(os, static_cast<uint8_t>(e.trainable ? 1 : 0));
    const auto& shape = e.tensor.shape();
    write_pod(os, static_cast<uint32_t>(shape.size()));
    for (int64_t d : shape) write_pod(os, d);
    os.write(reinterpret_cast<const char*>(e.tensor.data()),
             static_cast<std::streamsize>(sizeof(float) * e.tensor.numel()));
  }
  TG_CHECK(os.good(), "checkpoint: write failed: ", path);
}

CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store,
                               uint64_t expected_digest) {
  std::ifstream is(path, std::ios::binary);
  TG_CHECK(is.good(), "checkpoint: cannot open: ", path);
  char magic[8];
  is.read(magic, sizeof(magic));
  TG_CHECK(is.good() && std::memcmp(magic, kMagic, 8) == 0,
           "checkpoint: bad magic in ", path);
  const uint32_t version = read_pod<uint32_t>(is);
  TG_CHECK(version == kVersion, "checkpoint: unsupported version ", version);
  CheckpointMeta meta;
  meta.step = read_pod<uint64_t>(is);
  meta.config_digest = read_pod<uint64_t>(is);
  if (expected_digest != 0)
    TG_CHECK(meta.config_digest == expected_digest,
             "checkpoint: config digest mismatch for ", path, " (expected ",
             hex64(expected_digest), ", found ", hex64(meta.config_digest), ")");
  const uint32_t count = read_pod<uint32_t>(is);
  TG_CHECK(count == store.entries().size(), "checkpoint: entry count mismatch in ",
           path, " (", count, " vs ", store.entries().size(), ")");
  for (auto& e : store.entries()) {
    const uint32_t name_len = read_pod<uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    TG_CHECK(name == e.name, "checkpoint: entry order mismatch: ", name, " vs ", e.name);
    read_pod<uint8_t>(is);  // trainable flag, informational
    const uint32_t ndim = read_pod<uint32_t>(is);
    Shape shape(ndim);
    for (auto& d : shape) d = read_pod<int64_t>(is);
    TG_CHECK(shape == e.tensor.shape(), "checkpoint: shape mismatch for ", name);
    is.read(reinterpret_cast<char*>(e.tensor.data()),
            static_cast<std::streamsize>(sizeof(float) * e.tensor.numel()));
    TG_CHECK(static_cast<bool>(is), "checkpoint: truncated tensor data for ", name);
  }
  return meta;
}

CheckpointMeta peek_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TG_CHECK(is.good(), "checkpoint: cannot open: ", path);
  char magic[8];
  is.read(magic, sizeof(magic));
  TG_CHECK(is.good() && std::memcmp(magic, kMagic, 8) == 0,
           "checkpoint: bad magic in ", path);
  read_pod<uint32_t>(is);
  CheckpointMeta meta;
  meta.step = read_pod<uint64_t>(is);
  meta.config_digest = read_pod<uint64_t>(is);
  return meta;
}

bool checkpoint_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

}  // namespace talkgen::nn
