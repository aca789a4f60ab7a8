#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ed {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

}  // namespace detail

/// Counter-based random stream: every draw is a pure function of
/// (seed, stream, counter). Results are bit-identical under any evaluation
/// order or parallel partitioning.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    CounterRng() = default;
    CounterRng(std::uint64_t seed_, std::uint64_t stream_) : seed(seed_), stream(stream_) {}

    /// Uniform in [0, 1).
    double uniform_at(std::uint64_t counter) const {
        return static_cast<double>(detail::hash3(seed, stream, counter) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes counter slots 2c and 2c+1.
    double normal_at(std::uint64_t counter) const {
        const std::uint64_t h1 = detail::hash3(seed, stream, 2 * counter);
        const std::uint64_t h2 = detail::hash3(seed, stream, 2 * counter + 1);
        const double u1 = (static_cast<double>(h1 >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }
};

/// Fixed labeled hashing: derive a module stream id from the scenario seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : label) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return detail::hash3(seed, h, 0);
}

}  // namespace ed
