#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pisynth {

/// SplitMix64 generator. Every random decision in the pipeline draws from one of these,
/// so outputs are bit-exact across platforms and implementations.
class RandomStream {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit RandomStream(std::uint64_t state = 0) : state_(state) {}

    std::uint64_t next() {
        state_ += kGamma;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// One SplitMix64 output step applied to `x` (the first output of a stream seeded at `x`).
std::uint64_t splitmix64_scramble(std::uint64_t x);

/// FNV-1a 64-bit over the raw bytes of `bytes`.
std::uint64_t fnv1a64(std::string_view bytes);

/// Unbiased integer in [0, n) by rejection sampling. Requires n >= 1.
std::uint64_t bounded_uniform(RandomStream& rng, std::uint64_t n);

/// Uniform integer in [lo, hi] inclusive.
std::int64_t uniform_int(RandomStream& rng, std::int64_t lo, std::int64_t hi);

/// Uniform double in [0, 1) with 53 bits of resolution.
double uniform_unit(RandomStream& rng);

/// Per-(seed, key, epoch) stream, used to give each listing its own independent draws.
RandomStream substream(std::uint64_t seed, std::string_view key, std::uint64_t epoch);

/// Uniform random permutation of [0, k) via Fisher-Yates (descending swap form).
std::vector<std::size_t> fisher_yates(RandomStream& rng, std::size_t k);

/// `count` distinct indices from [0, n), in draw order. Partial Fisher-Yates.
std::vector<std::size_t> sample_without_replacement(RandomStream& rng, std::size_t n,
                                                    std::size_t count);

/// Index drawn proportionally to `weights` (non-negative, positive sum).
std::size_t weighted_choice(RandomStream& rng, const std::vector<double>& weights);

bool is_identity(const std::vector<std::size_t>& perm);

}  // namespace pisynth
