#pragma once

#include <cstdint>
#include <random>

namespace coalforge {

// Every simulation takes an explicit generator. Replicate streams are derived
// from a master seed and the replicate index, so results do not depend on
// how replicates are scheduled across workers.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream` under `master`:
/// splitmix64(splitmix64(master) ^ splitmix64(stream + golden)).
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream);

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_stream_seed(master, stream));
}

/// Uniform double in the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace coalforge
