#include "pisynth/random.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace pisynth {

std::uint64_t splitmix64_scramble(std::uint64_t x) {
    RandomStream s(x);
    return s.next();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t bounded_uniform(RandomStream& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("bounded_uniform: n must be >= 1");
    // 2^64 mod n, computed without 128-bit arithmetic.
    const std::uint64_t rem = (0 - n) % n;
    for (;;) {
        const std::uint64_t u = rng.next();
        // limit = 2^64 - rem; when rem == 0 every draw is accepted.
        if (rem == 0 || u < 0 - rem) return u % n;
    }
}

std::int64_t uniform_int(RandomStream& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(bounded_uniform(rng, span));
}

double uniform_unit(RandomStream& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

RandomStream substream(std::uint64_t seed, std::string_view key, std::uint64_t epoch) {
    const std::uint64_t mixed = seed ^ fnv1a64(key) ^ (epoch * RandomStream::kGamma);
    return RandomStream(splitmix64_scramble(mixed));
}

std::vector<std::size_t> fisher_yates(RandomStream& rng, std::size_t k) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = k; i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded_uniform(rng, i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

std::vector<std::size_t> sample_without_replacement(RandomStream& rng, std::size_t n,
                                                    std::size_t count) {
    if (count > n) throw std::invalid_argument("sample_without_replacement: count > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(bounded_uniform(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::size_t weighted_choice(RandomStream& rng, const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("weighted_choice: no weights");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("weighted_choice: weights sum to zero");
    const double u = uniform_unit(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    // Rounding can leave u just above the last cumulative sum.
    for (std::size_t i = weights.size(); i > 0; --i) {
        if (weights[i - 1] > 0.0) return i - 1;
    }
    return weights.size() - 1;
}

bool is_identity(const std::vector<std::size_t>& perm) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] != i) return false;
    }
    return true;
}

}  // namespace pisynth
