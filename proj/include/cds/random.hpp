#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace cds {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling over the raw engine
/// output, so results do not depend on the standard library's distribution
/// implementation.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform real in [0, 1) built from the top 53 bits of one engine draw.
double uniform_unit(Rng& rng);

/// splitmix64 mix of (seed, stream); used to give every trial or sub-step
/// its own independent, reproducible seed.
Seed derive_seed(Seed seed, std::uint64_t stream) noexcept;

/// 128 bits from the system CSPRNG, hex encoded.
std::string random_nonce();

/// 64 bits from the system CSPRNG.
Seed random_seed();

}  // namespace cds
