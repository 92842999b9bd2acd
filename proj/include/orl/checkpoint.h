// Copyright 2026 The ORL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ORL_CHECKPOINT_H_
#define ORL_CHECKPOINT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orl/network.h"

namespace orl {

// Binary layout, little-endian: "ORLC", u32 version, u64 config digest,
// u32 tensor count, then per tensor: u32 name length, name bytes, u32 rank,
// u32 dims, f32 values in row-major order.
//
// Tensors are "online.<param>", "target.<param>", the online projector's
// running statistics and a rank-0 "tau".
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  uint64_t config_digest = 0;
  DualNetwork net;
};

std::vector<uint8_t> serialize_checkpoint(const DualNetwork& net,
                                          uint64_t config_digest);
// Throws DataError on a malformed buffer.
Checkpoint deserialize_checkpoint(std::span<const uint8_t> bytes);

void write_checkpoint(const std::string& path, const DualNetwork& net,
                      uint64_t config_digest);
Checkpoint read_checkpoint(const std::string& path);

// First 16 hex characters of a digest as an integer.
uint64_t digest_to_u64(const std::string& hex);

}  // namespace orl

#endif  // ORL_CHECKPOINT_H_
