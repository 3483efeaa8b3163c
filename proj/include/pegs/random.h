// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEGS_RANDOM_H_
#define PEGS_RANDOM_H_

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace pegs {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Independent random stream identified by (seed, stream id). The 128-bit
// Philox counter is (block index, stream id); the key is the seed, so any two
// distinct (seed, stream) pairs never share a block. Satisfies
// std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);
  // Inverse-CDF draw from a probability vector with a single uniform.
  int Categorical(std::span<const double> probabilities);
  // Standard normal via Box-Muller (one of the pair is discarded).
  double Normal();

 private:
  void Refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

// Purposes keep streams for different jobs disjoint under one seed.
enum class StreamPurpose : std::uint8_t {
  kSynthesis = 1,
  kPmiSynthesis = 2,
  kGenerator = 3,
  kResample = 4,
};

// Packs (purpose, dataset, item) into a stream id: 8 | 20 | 36 bits.
// Throws PegsError(kUsage) when dataset >= 2^20 or item >= 2^36.
std::uint64_t StreamId(StreamPurpose purpose, std::uint64_t dataset,
                       std::uint64_t item);

}  // namespace pegs

#endif  // PEGS_RANDOM_H_
