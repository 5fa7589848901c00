#pragma once

#include <cstdint>

namespace vfp {

// Counter-based generator: every draw is a pure function of
// (seed, slot, stream, counter), so the number of draws consumed by one
// stream never shifts another. That keeps cost realizations identical
// across algorithms that make different decisions on the same seed.
namespace rng {

// Stream ids. Environment and controller share the seed but never a stream.
enum : std::uint32_t {
    kStreamArrival = 0,
    kStreamDemand = 1,
    kStreamCost = 2,
    kStreamDecide = 3,
    kStreamInstanceCost = 16,
    kStreamInstanceDemand = 17,
};

constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t slot, std::uint32_t stream,
                            std::uint64_t counter) {
    std::uint64_t z = mix(seed);
    z = mix(z ^ slot);
    z = mix(z ^ stream);
    z = mix(z ^ counter);
    return z;
}

// Uniform double in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t slot, std::uint32_t stream,
                      std::uint64_t counter) {
    return static_cast<double>(key(seed, slot, stream, counter) >> 11) * 0x1.0p-53;
}

inline bool bernoulli(double p, std::uint64_t seed, std::uint64_t slot, std::uint32_t stream,
                      std::uint64_t counter) {
    return uniform(seed, slot, stream, counter) < p;
}

}  // namespace rng
}  // namespace vfp
