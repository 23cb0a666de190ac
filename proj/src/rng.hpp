#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace didrf {

// All randomness flows through this wrapper. mt19937_64 output and the
// uniform-double conversion below are fully pinned by the C++ standard, so
// runs reproduce bit-for-bit across platforms and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Fisher-Yates. Always consumes exactly size()-1 draws so parallel policy
    // runs sharing a seed stay in lockstep.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Trial seeds are base_seed + trial_index; per-(query, stream) generators are
// derived from them so that (config, base_seed) pins every draw regardless of
// scheduling order.
inline std::uint64_t derive_seed(std::uint64_t trial_seed, std::uint64_t query_index,
                                 std::uint64_t stream_tag) {
    return splitmix64(splitmix64(trial_seed ^ (query_index * 0x9e3779b97f4a7c15ULL)) ^ stream_tag);
}

// Stream tags for the independent per-(query, trial) generators.
inline constexpr std::uint64_t kStreamTieBreak = 0x7469650aULL;
inline constexpr std::uint64_t kStreamClicks = 0x636c6b0aULL;
inline constexpr std::uint64_t kStreamScores = 0x73636f0aULL;

}  // namespace didrf
