#pragma once

#include <cmath>
#include <cstdint>

namespace becmirror {

// Philox-4x32-10 counter-based generator (Salmon et al. constants).
// Stateless: each (key, counter) block is independent, so per-path noise
// streams keyed by (seed, path) are order-independent and parallelizable.
struct Philox4x32 {
  struct Block { uint32_t v[4]; };

  static Block generate(uint64_t seed, uint64_t path, uint64_t counter) {
    uint32_t k0 = static_cast<uint32_t>(seed);
    uint32_t k1 = static_cast<uint32_t>(seed >> 32);
    uint32_t c0 = static_cast<uint32_t>(counter);
    uint32_t c1 = static_cast<uint32_t>(counter >> 32);
    uint32_t c2 = static_cast<uint32_t>(path);
    uint32_t c3 = static_cast<uint32_t>(path >> 32);
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = 0xD2511F53ull * c0;
      const uint64_t p1 = 0xCD9E8D57ull * c2;
      const uint32_t h0 = static_cast<uint32_t>(p0 >> 32);
      const uint32_t l0 = static_cast<uint32_t>(p0);
      const uint32_t h1 = static_cast<uint32_t>(p1 >> 32);
      const uint32_t l1 = static_cast<uint32_t>(p1);
      const uint32_t n0 = h1 ^ c1 ^ k0;
      const uint32_t n1 = l1;
      const uint32_t n2 = h0 ^ c3 ^ k1;
      const uint32_t n3 = l0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {{c0, c1, c2, c3}};
  }
};

// Uniform in (0, 1): 53 random bits, offset away from zero.
inline double philox_uniform(uint32_t lo, uint32_t hi) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// One standard normal per (seed, path, counter) block via Box-Muller.
inline double philox_normal(uint64_t seed, uint64_t path, uint64_t counter) {
  const auto b = Philox4x32::generate(seed, path, counter);
  const double u1 = philox_uniform(b.v[0], b.v[1]);
  const double u2 = philox_uniform(b.v[2], b.v[3]);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.28318530717958647692 * u2);
}

}  // namespace becmirror
