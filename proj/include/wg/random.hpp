#pragma once

#include <cstdint>
#include <random>

namespace wg {

using Rng = std::mt19937_64;

// Independent random streams derived from one master seed. The numeric
// values are part of the reproducibility contract; do not renumber.
enum class Stream : std::uint64_t {
  Explanations = 0x11,
  Baseline = 0x22,
  Projections = 0x33,
  Smoothing = 0x44,
  Training = 0x55,
  Dataset = 0x66,
  Perturbation = 0x77,
  Candidates = 0x88,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream) {
  return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x632be59bd9b4e019ULL * (index + 1));
}

}  // namespace wg
