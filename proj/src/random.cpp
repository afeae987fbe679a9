#include "cds/random.hpp"

#include "cds/error.hpp"

#include <openssl/rand.h>

#include <array>
#include <limits>

namespace cds {

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) {
        throw Error(Errc::InvalidRange, "uniform_below bound must be positive");
    }
    // Largest multiple of bound that fits; draws above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Seed derive_seed(Seed seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string random_nonce() {
    std::array<unsigned char, 16> bytes{};
    if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
        throw Error(Errc::IoError, "system random source unavailable");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0f]);
    }
    return out;
}

Seed random_seed() {
    std::array<unsigned char, sizeof(Seed)> bytes{};
    if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
        throw Error(Errc::IoError, "system random source unavailable");
    }
    Seed seed = 0;
    for (unsigned char b : bytes) {
        seed = (seed << 8) | b;
    }
    return seed;
}

}  // namespace cds
