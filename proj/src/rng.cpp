// Copyright 2026 the ksat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ksat/rng.hpp"

namespace ksat {

namespace {

constexpr uint64_t kKeyParity = 0x1BD11BDAA9FC1A22ULL;

// Rotation schedule for Threefry2x64 (period 8).
constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};

inline uint64_t rotl(uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

// Fork derivations live in a counter domain with a nonzero high word so they
// can never collide with draw blocks (which use ctr1 = 0).
constexpr uint64_t kForkDomain = 0x464F524B00000000ULL;  // "FORK" << 32

}  // namespace

std::array<uint64_t, 2> Threefry2x64::block(uint64_t key0, uint64_t key1,
                                            uint64_t ctr0, uint64_t ctr1) {
  const uint64_t ks[3] = {key0, key1, key0 ^ key1 ^ kKeyParity};
  uint64_t x0 = ctr0 + ks[0];
  uint64_t x1 = ctr1 + ks[1];
  for (int round = 0; round < 20; ++round) {
    x0 += x1;
    x1 = rotl(x1, kRot[round & 7]);
    x1 ^= x0;
    if ((round & 3) == 3) {
      uint64_t j = static_cast<uint64_t>(round >> 2) + 1;
      x0 += ks[j % 3];
      x1 += ks[(j + 1) % 3] + j;
    }
  }
  return {x0, x1};
}

uint64_t RandomSource::next_u64() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  auto out = Threefry2x64::block(seed_, stream_, counter_++, 0);
  spare_ = out[1];
  has_spare_ = true;
  return out[0];
}

uint64_t RandomSource::below(uint64_t bound) {
  // Rejection sampling over the top of the range to kill modulo bias.
  uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

RandomSource RandomSource::fork(uint32_t tag, uint64_t child) const {
  auto out = Threefry2x64::block(seed_, stream_, child, kForkDomain | tag);
  return RandomSource(seed_, out[0]);
}

}  // namespace ksat
