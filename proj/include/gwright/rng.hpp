#pragma once

// Counter-based pseudo-random generator with caller-owned state.
//
// The generator is a 64-bit counter advanced by the golden-ratio increment
// and finalized with the splitmix64 mixer. State is a single word, streams
// can be split deterministically (substream), and identical seeds replay
// identical sequences regardless of what other streams exist. No global
// state anywhere.

#include <cmath>
#include <cstdint>

namespace gwright {

struct RngState {
    std::uint64_t counter = 0;

    static RngState seeded(std::uint64_t seed) { return RngState{seed}; }

    // Independent stream derived from this state and an index; used for
    // per-row sampling so results do not depend on thread partitioning.
    RngState substream(std::uint64_t index) const {
        RngState s{mix(counter ^ (0x9E3779B97F4A7C15ULL + index * 0xBF58476D1CE4E5B9ULL))};
        return s;
    }

    std::uint64_t next_u64() {
        counter += 0x9E3779B97F4A7C15ULL;
        return mix(counter);
    }

    // Uniform on (0, 1]: 53 random bits, shifted away from exact zero so
    // logs of uniforms are always finite.
    double uniform() {
        return ((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via the Box-Muller transform. Each call consumes two
    // uniforms and returns one variate; the cosine partner is deliberately
    // not cached so the draw count per call is fixed.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.2831853071795864769 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }
};

}  // namespace gwright
