#pragma once

#include <cassert>
#include <cstdint>

namespace rpd {

// SplitMix64 stream with an integer-only uniform block draw. The draw path
// avoids floating point entirely so block sequences are reproducible across
// platforms and languages.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw from {1, ..., p}. Rejection sampling removes modulo bias:
  // resample while the raw draw falls at or above floor(2^64 / p) * p.
  // rem below equals 2^64 mod p, so the comparison never rejects when p
  // divides 2^64.
  int draw_block(int p) {
    assert(p >= 1);
    const std::uint64_t up = static_cast<std::uint64_t>(p);
    const std::uint64_t rem = (0ULL - up) % up;
    std::uint64_t u = next_u64();
    while (u > 0xFFFFFFFFFFFFFFFFULL - rem) u = next_u64();
    return static_cast<int>(u % up) + 1;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace rpd
