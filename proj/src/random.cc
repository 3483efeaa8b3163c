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

#include "pegs/random.h"

#include <cmath>
#include <numbers>

#include "pegs/error.h"

namespace pegs {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline void Round(std::array<std::uint32_t, 4>& ctr,
                  const std::array<std::uint32_t, 2>& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  MulHiLo(kMul0, ctr[0], hi0, lo0);
  MulHiLo(kMul1, ctr[2], hi1, lo1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  Round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    Round(counter, key);
  }
  return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void RngStream::Refill() {
  buffer_ = Philox4x32({static_cast<std::uint32_t>(block_),
                        static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(stream_),
                        static_cast<std::uint32_t>(stream_ >> 32)},
                       key_);
  ++block_;
  next_ = 0;
}

RngStream::result_type RngStream::operator()() {
  if (next_ > 2) Refill();
  const std::uint64_t lo = buffer_[next_];
  const std::uint64_t hi = buffer_[next_ + 1];
  next_ += 2;
  return lo | (hi << 32);
}

double RngStream::Uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::UniformInt(std::uint64_t n) {
  if (n == 0) ThrowUsage("UniformInt needs n > 0");
  // Lemire's multiply-shift with rejection of the biased low region.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int RngStream::Categorical(std::span<const double> probabilities) {
  const double u = Uniform();
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] <= 0.0) continue;
    last_positive = static_cast<int>(j);
    cumulative += probabilities[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  // Rounding left the cumulative sum just below u.
  if (last_positive < 0) ThrowData("categorical draw from an all-zero vector");
  return last_positive;
}

double RngStream::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t StreamId(StreamPurpose purpose, std::uint64_t dataset,
                       std::uint64_t item) {
  if (dataset >= (std::uint64_t{1} << 20)) {
    ThrowUsage("dataset index exceeds 2^20 streams");
  }
  if (item >= (std::uint64_t{1} << 36)) {
    ThrowUsage("item index exceeds 2^36 streams");
  }
  return (static_cast<std::uint64_t>(purpose) << 56) | (dataset << 36) | item;
}

}  // namespace pegs
