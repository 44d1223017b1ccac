#pragma once

#include <cstdint>
#include <string_view>

namespace mazeswarm {

/// Identifier of the PRNG algorithm, echoed into run metadata so results
/// can be replicated on a different machine or standard library.
inline constexpr std::string_view kRngId = "splitmix64";

/// SplitMix64 generator (Steele, Lea, Flood 2014). Chosen over the
/// <random> engines because its output is fully pinned by the algorithm,
/// independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t nextU64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniformInt(std::uint64_t bound) {
        // Multiply-shift reduction; bias is < 2^-40 for the bounds used here
        // (grid sizes), and the mapping is platform-independent.
        unsigned __int128 product =
            static_cast<unsigned __int128>(nextU64()) * bound;
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Uniform double in [0, 1).
    double uniformReal01() {
        return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Stable seed derivation for independent sub-streams (experiment cells,
/// agent placement). Feeds each component through one SplitMix64 step.
inline std::uint64_t deriveSeed(std::uint64_t base,
                                std::uint64_t a = 0,
                                std::uint64_t b = 0,
                                std::uint64_t c = 0) {
    Rng mix(base);
    std::uint64_t s = mix.nextU64();
    s ^= Rng(a ^ 0xA5A5A5A5A5A5A5A5ull).nextU64();
    s = Rng(s).nextU64();
    s ^= Rng(b ^ 0x3C3C3C3C3C3C3C3Cull).nextU64();
    s = Rng(s).nextU64();
    s ^= Rng(c ^ 0x0F0F0F0F0F0F0F0Full).nextU64();
    return Rng(s).nextU64();
}

}  // namespace mazeswarm
