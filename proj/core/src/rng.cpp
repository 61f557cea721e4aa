#include "council/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace council {

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> labels) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int shift = 0; shift < 64; shift += 8) {
        h ^= (master >> shift) & 0xff;
        h *= 0x100000001b3ull;
    }
    for (auto label : labels) {
        h = fnv1a(label, h);
        h ^= 0x1f;  // unit separator between labels
        h *= 0x100000001b3ull;
    }
    // A zero seed would make SplitMix64's first outputs degenerate-looking.
    return h == 0 ? 0x9e3779b97f4a7c15ull : h;
}

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::vector<int> sample_distinct_sorted(int n, int k, SplitMix64& rng) {
    std::vector<int> out;
    if (n <= 0 || k <= 0) return out;
    if (k >= n) {
        out.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
        return out;
    }
    // Floyd's sampling: k iterations, no O(n) scratch.
    std::unordered_set<int> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (int j = n - k; j < n; ++j) {
        int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    out.assign(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace council
