#pragma once

#include <cmath>
#include <cstdint>

namespace mtb {

// splitmix64 finalizer (Vigna). One round is a good 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based noise source. Every draw is a pure function of
/// (seed, channel, counter): streams are reproducible bit-for-bit for a
/// fixed seed, independent across channels, and need no shared state.
/// Gaussian variates come from Box-Muller over two counter slots, so the
/// generator is fully specified and documented here.
struct NoiseStream {
  std::uint64_t seed = 0;

  std::uint64_t word(std::uint64_t channel, std::uint64_t counter) const {
    return splitmix64(splitmix64(splitmix64(seed) ^ channel) ^ counter);
  }

  // uniform on (0, 1]; never returns 0 so log() below is safe
  double uniform(std::uint64_t channel, std::uint64_t counter) const {
    return static_cast<double>((word(channel, counter) >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian(std::uint64_t channel, std::uint64_t counter) const {
    const double u1 = uniform(channel, 2 * counter);
    const double u2 = uniform(channel, 2 * counter + 1);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }
};

// FNV-1a, used for content digests (profile, curve) in metadata.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace mtb
