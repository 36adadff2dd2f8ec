#pragma once

#include <cstdint>
#include <random>

namespace levyspde {

using Rng = std::mt19937_64;

/// Sub-stream tags. Each trajectory owns one independent stream per tag so
/// that, e.g., sampling large-jump times never shifts the per-step noise.
enum class Stream : std::uint32_t {
  step_noise = 1,
  large_jumps = 2,
  initial_state = 3,
  sampling = 4,
  isometry = 5,
};

/// Counter-based stream derivation: the engine state is a pure function of
/// (master seed, index, stream tag). Distinct indices give unrelated streams
/// regardless of the order in which they are created.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index, Stream tag);

/// SplitMix64 finalizer, exposed for tests and for hashing seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace levyspde
