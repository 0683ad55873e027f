#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tomra {

using Engine = std::mt19937_64;

// Independent stream per (seed, index).  Same pair, same draws, regardless of thread layout.
inline Engine make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x7a3du};
  return Engine(seq);
}

// Portable uniform on [0,1): the std distributions are not bit-stable across library vendors.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Engine& e, std::size_t n) {
  auto k = static_cast<std::size_t>(uniform01(e) * static_cast<double>(n));
  return k < n ? k : n - 1;
}

inline double standard_normal(Engine& e) {
  // Box-Muller, one value per call.
  double u1 = uniform01(e);
  double u2 = uniform01(e);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Radical inverse in the given base; index i >= 0.
inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += static_cast<double>(i % base) * f;
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace tomra
