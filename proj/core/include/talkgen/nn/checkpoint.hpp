#pragma once

#include <cstdint>
#include <string>

#include "talkgen/nn/layers.hpp"

namespace talkgen::nn {

// Binary checkpoint container, little-endian:
//   magic "TGCKPT01" | u32 version | u64 step | u64 config digest |
//   u32 entry count | entries
// entry: u32 name length | name bytes | u8 trainable | u32 ndim |
//        i64 dims | f32 values
struct CheckpointMeta {
  uint64_t step = 0;
  uint64_t config_digest = 0;
};

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const CheckpointMeta& meta);

// Loads into an already-constructed store; names and shapes must match.
// If `expected_digest` is nonzero, a mismatch raises.
CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store,
                               uint64_t expected_digest = 0);

// Reads only the header.
CheckpointMeta peek_checkpoint(const std::string& path);

bool checkpoint_exists(const std::string& path);

}  // namespace talkgen::nn
