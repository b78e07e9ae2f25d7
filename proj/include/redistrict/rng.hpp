#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace redistrict {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Bounded draws do not use std::uniform_int_distribution (its
/// algorithm is implementation-defined); uniform_index() uses Lemire's
/// multiply-and-reject method so results are bit-identical across standard
/// libraries.
///
/// Stream splitting: stream(master, i) seeds the engine with
/// splitmix64(master ^ splitmix64(i + 1)), giving every ensemble run its own
/// reproducible sequence regardless of the order runs execute in.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(splitmix64(master ^ splitmix64(index + 1)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<unsigned __int128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace redistrict
