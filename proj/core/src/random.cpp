#include "craftmaps/random.hpp"

#include "craftmaps/error.hpp"

#include <cmath>
#include <string>
#include <numbers>

namespace craftmaps {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index) {
  return splitmix64(splitmix64(root ^ fnv1a64(tag)) + splitmix64(index));
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
}

static inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

// Lemire's nearly-divisionless bounded draw.
std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() { return bits_to_unit(next_u64()); }

double box_muller(double u1, double u2) {
  // u1 in [0,1) -> (0,1]
  double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  return box_muller(u1, u2);
}

std::vector<std::uint32_t> sample_without_replacement(std::uint64_t population,
                                                      std::size_t count, Rng& rng) {
  if (count > population)
    throw InvalidArgument("cannot draw " + std::to_string(count) + " distinct values from " +
                          std::to_string(population));
  std::vector<std::uint32_t> pool(population);
  for (std::uint64_t i = 0; i < population; ++i) pool[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.uniform_below(population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace craftmaps
