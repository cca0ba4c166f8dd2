#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fdss {

/// SplitMix64 finalizer; full-avalanche 64-bit mixing.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream identifiers keeping independent random draws apart. Each (seed,
/// stream, block) triple indexes a statistically independent sequence.
namespace stream {
inline constexpr std::uint64_t kSymbols = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kTrainBatch = 3;
inline constexpr std::uint64_t kTestBatch = 4;
}  // namespace stream

/**
 * @brief Counter-based per-block random stream.
 *
 * The state is a pure function of (seed, stream, block), so Monte Carlo
 * results do not depend on thread count or evaluation order: every block
 * draws from its own sequence. Generation is SplitMix64, which is fast and
 * passes standard statistical batteries.
 */
class BlockRng {
public:
    BlockRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
        : state_(mix64(mix64(mix64(seed) ^ stream) ^ block)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double strictly inside (0, 1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = sigma2.
    std::complex<double> next_cgauss(double sigma2) {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-sigma2 * std::log(u1));
        const double phi = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::uint64_t state_;
};

}  // namespace fdss
