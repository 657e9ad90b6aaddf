#pragma once

#include <cmath>
#include <cstdint>

namespace isinglab {

// SplitMix64 (Steele, Lea & Flood 2014): a fixed-increment counter generator
// with a 64-bit mixing function. Chosen because substreams are cheap to
// derive by hashing, which keeps simulation replications reproducible
// regardless of execution order or thread count.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1), 53 random bits
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform double in [-a, a]
    double next_symmetric(double a) { return a * (2.0 * next_unit() - 1.0); }

    // integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

    // Box-Muller, cosine branch only: every call consumes exactly two
    // 64-bit draws, so the stream position is independent of the values.
    double next_gaussian(double mean, double sd) {
        double u1 = 1.0 - next_unit();  // (0, 1]: keeps the log finite
        double u2 = next_unit();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
        return mean + sd * z;
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Derives an independent substream from (seed, a, b, c). Replications keyed
// by grid indices get identical draws no matter which thread runs them.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
    std::uint64_t h = seed;
    h = detail::mix64(h ^ ((a + 1) * 0x9E3779B97F4A7C15ULL));
    h = detail::mix64(h ^ ((b + 1) * 0xC2B2AE3D27D4EB4FULL));
    h = detail::mix64(h ^ ((c + 1) * 0x165667B19E3779F9ULL));
    return SplitMix64(h);
}

}  // namespace isinglab
