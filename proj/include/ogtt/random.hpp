// Portable random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the distributions come from
// Boost.Random, whose algorithms do not vary between standard libraries.
// Together they make every seeded run reproducible across platforms.
#ifndef OGTT_RANDOM_HPP
#define OGTT_RANDOM_HPP

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cstdint>
#include <random>

namespace ogtt {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-replicate seeds
/// from (master seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) { return boost::random::uniform_01<double>{}(rng); }

inline double standard_normal(Rng& rng) {
  return boost::random::normal_distribution<double>{0.0, 1.0}(rng);
}

/// Gamma draw in the shape/rate parameterization.
inline double gamma_draw(Rng& rng, double shape, double rate) {
  return boost::random::gamma_distribution<double>{shape, 1.0 / rate}(rng);
}

}  // namespace ogtt

#endif  // OGTT_RANDOM_HPP
