#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lcrec {

// Deterministic pseudo-random source. std::mt19937_64 is fully specified by
// the standard but the distributions are not, so all draws go through the
// explicit conversions below to keep results bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (explicit formula, deterministic).
    double normal();
    double normal(double mean, double stddev);
    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Fisher-Yates shuffle with draws from this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

// splitmix64, the standard 64-bit avalanche mixer.
std::uint64_t mix_u64(std::uint64_t x);

// Derives an independent child seed from a root seed and one or more stream
// identifiers. Used to give every stage / walk / rerun its own stream so
// results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b);
std::uint64_t stage_seed(std::uint64_t root, std::string_view stage);

// FNV-1a over a byte string; used for config hashing.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace lcrec
