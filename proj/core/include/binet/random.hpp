#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace binet {

/// All sampling goes through this engine. The helpers below avoid the
/// std distributions so that sequences are identical across standard libraries.
using Rng = std::mt19937_64;

/// Engine for independent stream `stream` of a seeded computation (seed xor stream).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform real in [0, 1) with 53 bits of precision.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). `n` must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform integer in [lo, hi] (inclusive).
std::size_t uniform_between(Rng& rng, std::size_t lo, std::size_t hi);

/// Index drawn proportionally to `weights` (nonnegative, positive sum).
std::size_t weighted_index(Rng& rng, std::span<const double> weights);

/// SplitMix64 finalizer, used to derive seeds from seeds.
std::uint64_t mix_seed(std::uint64_t value);

template <class T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace binet
