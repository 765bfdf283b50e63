#pragma once

#include <cstdint>
#include <initializer_list>

namespace voxhalf {

// Stateless counter-based generator: every draw is a pure function of a key
// tuple, so results do not depend on evaluation order or thread schedule.

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood; also the xxhash-style avalanche).
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

inline uint64_t keyed_bits(uint64_t seed, std::initializer_list<uint64_t> words) {
    uint64_t h = detail::mix64(seed ^ 0x6a09e667f3bcc909ull);
    for (uint64_t w : words) h = detail::mix64(h ^ (w * 0xd1b54a32d192ed03ull + 0x2545f4914f6cdd1dull));
    return h;
}

// Uniform in [0, 1) with 53-bit resolution.
inline double keyed_unit(uint64_t seed, std::initializer_list<uint64_t> words) {
    return static_cast<double>(keyed_bits(seed, words) >> 11) * 0x1.0p-53;
}

}  // namespace voxhalf
