#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rial {

// mt19937_64 output is fixed by the standard; the distributions in <random>
// are not, so index sampling goes through uniform_index below.
using Rng = std::mt19937_64;

// SplitMix64 finalizer; combines seed material into a well-mixed seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Stable 64-bit FNV-1a hash, used to fork RNG streams by name.
std::uint64_t stable_hash(std::string_view text);

// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

}  // namespace rial
