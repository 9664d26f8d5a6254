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

#ifndef KSAT_RNG_HPP
#define KSAT_RNG_HPP

#include <array>
#include <cstdint>

namespace ksat {

/// Threefry2x64, 20 rounds. A counter-based block cipher style generator:
/// output is a pure function of (key, counter), so streams are reproducible
/// from (seed, stream) alone. Test vectors live in tests/data/rng_vectors.json.
struct Threefry2x64 {
  static std::array<uint64_t, 2> block(uint64_t key0, uint64_t key1,
                                       uint64_t ctr0, uint64_t ctr1);
};

/// Deterministic random stream keyed by (seed, stream).
///
/// Draws consume counter blocks (i, 0) for i = 0, 1, 2, ...; forked child
/// streams are derived from counter blocks with a nonzero second word, so a
/// parent stream and its children never overlap. Identical (seed, stream)
/// always reproduces the identical sequence of calls.
class RandomSource {
 public:
  RandomSource(uint64_t seed, uint64_t stream)
      : seed_(seed), stream_(stream) {}

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

  uint64_t next_u64();

  /// Uniform real in [0,1) with 53 random bits.
  double next_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Single uniform bit, served from a 64-bit pool.
  bool next_bit() {
    if (bit_count_ == 0) {
      bit_pool_ = next_u64();
      bit_count_ = 64;
    }
    bool b = bit_pool_ & 1;
    bit_pool_ >>= 1;
    --bit_count_;
    return b;
  }

  /// Uniform integer in [0, bound) without modulo bias. bound must be >= 1.
  uint64_t below(uint64_t bound);

  /// Derive an independent child stream. Children of the same parent with
  /// distinct (tag, child) pairs are distinct; the derivation uses the fork
  /// counter domain, disjoint from the draw domain.
  RandomSource fork(uint32_t tag, uint64_t child) const;

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
  uint64_t spare_ = 0;
  bool has_spare_ = false;
  uint64_t bit_pool_ = 0;
  int bit_count_ = 0;
};

/// Stream tags used by the pipeline so the purpose of every substream is
/// pinned down and reproducible across implementations.
enum StreamTag : uint32_t {
  kStreamGenerate = 1,
  kStreamMarkAttempt = 2,
  kStreamChain = 3,
  kStreamReplicate = 4,
  kStreamCoupling = 5,
  kStreamContext = 6,
  kStreamVerify = 7,
};

}  // namespace ksat

#endif  // KSAT_RNG_HPP
