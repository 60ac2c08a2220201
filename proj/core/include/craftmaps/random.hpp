#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace craftmaps {

// Every random draw in the library goes through these helpers so that results
// are reproducible across standard libraries (std distributions are not).

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless 64 random bits at position `counter` of the stream keyed by `key`.
/// Used for weights that are regenerated on demand instead of stored.
constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) {
  return splitmix64(splitmix64(key) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

/// Child seed for a named component (and optional index) of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double normal();
  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

/// `count` distinct values from [0, population), in draw order.
std::vector<std::uint32_t> sample_without_replacement(std::uint64_t population,
                                                      std::size_t count, Rng& rng);

/// Standard normal from two uniforms (Box-Muller, cosine branch).
double box_muller(double u1, double u2);

inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace craftmaps
