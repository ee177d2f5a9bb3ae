#pragma once

#include <array>
#include <cstdint>

namespace boxsearch {

// Philox4x32-10 counter generator (Salmon et al. reference constants).
//
// A stream is a pure function of (seed, trial, agent, lane): the 64-bit
// block index forms half the counter, the ids fill the other half, and the
// key is derived from the seed alone.  Any worker thread can therefore
// replay any stream from scratch, which is what makes simulation results
// independent of the thread count.  Lane 0 is the agent's box draws;
// the treasure draw for a trial uses agent id 0.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t trial, uint32_t agent, uint32_t lane = 0) {
    uint64_t kd = mix64(seed + 0x9E3779B97F4A7C15ull);
    key_ = {static_cast<uint32_t>(kd), static_cast<uint32_t>(kd >> 32)};
    id_hi_ = static_cast<uint32_t>(trial);
    id_lo_ = (agent << 8) ^ static_cast<uint32_t>(trial >> 32) * 0x85EBCA6Bu ^ lane;
  }

  uint32_t next_u32() {
    if (have_ == 0) refill();
    return out_[--have_];
  }

  uint64_t next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n), bias-free.  Ranges that fit in 32 bits take
  // Lemire's multiply-shift: one lane per draw and no division unless the
  // low word lands in the rejection strip (probability n / 2^32).
  uint64_t next_below(uint64_t n) {
    if (n <= 0xFFFFFFFFull) {
      const uint32_t n32 = static_cast<uint32_t>(n);
      uint64_t m = static_cast<uint64_t>(next_u32()) * n32;
      uint32_t lo = static_cast<uint32_t>(m);
      if (lo < n32) {
        const uint32_t t = (0u - n32) % n32;  // 2^32 mod n
        while (lo < t) {
          m = static_cast<uint64_t>(next_u32()) * n32;
          lo = static_cast<uint32_t>(m);
        }
      }
      return m >> 32;
    }
    uint64_t limit = n * (~uint64_t{0} / n);
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  static uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  void refill() {
    std::array<uint32_t, 4> c = {static_cast<uint32_t>(block_),
                                 static_cast<uint32_t>(block_ >> 32), id_hi_, id_lo_};
    std::array<uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = 0xD2511F53ull * c[0];
      uint64_t p1 = 0xCD9E8D57ull * c[2];
      c = {static_cast<uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<uint32_t>(p1),
           static_cast<uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<uint32_t>(p0)};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    out_ = c;
    have_ = 4;
    ++block_;
  }

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> out_ = {};
  uint32_t id_hi_ = 0, id_lo_ = 0;
  uint64_t block_ = 0;
  int have_ = 0;
};

}  // namespace boxsearch
