#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace ppsel {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t hash_bytes(const void* data, std::size_t len, std::uint64_t seed = 0x51ed27a3ULL) {
    // FNV-1a followed by a 64-bit finalizer.
    auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (std::size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

inline std::uint64_t hash_string(std::string_view s, std::uint64_t seed = 0x51ed27a3ULL) {
    return hash_bytes(s.data(), s.size(), seed);
}

// SplitMix64 generator. Streams are derived from (seed, index) so that
// process i always sees the same draws regardless of scheduling.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
    }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential() { return -std::log(uniform_open()); }

    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace ppsel
