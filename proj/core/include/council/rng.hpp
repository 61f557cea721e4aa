#pragma once
// Seeded, platform-independent randomness. Every random draw in the project
// goes through SplitMix64 seeded from derive_seed(), never through shared
// generator state, so identical inputs replay identically on any platform.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace council {

// FNV-1a 64-bit over a byte sequence.
constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Mixes a master seed with a list of string labels (task id, agent id, stage
// name, round, ...). Labels are separated by a unit separator so that
// ("ab","c") and ("a","bc") derive different seeds.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> labels);

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n), n >= 1 (Lemire's rejection method).
    std::uint64_t next_below(std::uint64_t n);

    // Integer in [lo, hi] inclusive.
    int next_int(int lo, int hi) {
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Real in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool(double p_true) { return next_double() < p_true; }
};

// k distinct values from [0, n), returned sorted ascending. k > n yields all of [0, n).
std::vector<int> sample_distinct_sorted(int n, int k, SplitMix64& rng);

}  // namespace council
