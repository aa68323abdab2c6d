#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>

namespace smdim {

/// Mixes `value` into `state` with the SplitMix64 finalizer. Used to derive
/// independent, reproducible seeds for named streams.
constexpr std::uint64_t mix_seed(std::uint64_t state, std::uint64_t value) noexcept {
  std::uint64_t z = state ^ (value + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a; gives stream names a stable numeric tag.
constexpr std::uint64_t stream_tag(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the stream `name` under `parent`, further keyed by `indices`.
/// Streams with different names or indices are statistically independent.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view name,
                                    std::initializer_list<std::uint64_t> indices = {}) noexcept {
  std::uint64_t s = mix_seed(parent, stream_tag(name));
  for (auto i : indices) s = mix_seed(s, i);
  return s;
}

/// Thin wrapper over mt19937_64 whose real-valued draws are computed by hand,
/// so sequences are identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejecting the top partial block keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace smdim
