#pragma once

#include <cstddef>
#include <cstdint>

namespace ghzqkd {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// SplitMix64 as a UniformRandomBitGenerator. Seeding is O(1), which matters
/// because every round opens several short streams.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed = 0) noexcept : state_{seed} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t out = splitmix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  constexpr void discard(std::uint64_t n) noexcept { state_ += n * 0x9e3779b97f4a7c15ULL; }

  friend constexpr bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t state_;
};

/// Who consumes a per-round random stream.
enum class StreamRole : std::uint64_t {
  Key = 1,
  Alice,
  Bob,
  Charlie,
  Eve,
  NoiseA,
  NoiseC,
  Measurement,
};

/// Round index reserved for session-wide streams (the key).
inline constexpr std::uint64_t kSessionStream = ~std::uint64_t{0};

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                           std::uint64_t salt) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ (salt * 0xd6e8feb86659fd93ULL));
}

/// Independent generator for (seed, round, role). Streams never overlap in use,
/// so rounds can be evaluated in any order or in parallel.
inline Rng make_stream(std::uint64_t seed, std::uint64_t round, StreamRole role) {
  return Rng{derive_seed(seed, round, static_cast<std::uint64_t>(role))};
}

/// Uniform double in [0, 1) from the top 53 bits of one draw. Portable across
/// standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace ghzqkd
