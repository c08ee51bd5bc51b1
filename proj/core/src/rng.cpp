#include "lcrec/rng.hpp"

#include <cmath>

namespace lcrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** seeded through splitmix64.
Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += 0x9e3779b97f4a7c15ULL;
        word = mix_u64(s);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = r * std::sin(kTwoPi * u2);
    have_cached_normal_ = true;
    return r * std::cos(kTwoPi * u2);
}

double Rng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = n * ((~0ULL) / n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a) {
    return mix_u64(root ^ mix_u64(a));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    return mix_u64(derive_seed(root, a) ^ mix_u64(b + 0x6a09e667f3bcc909ULL));
}

std::uint64_t stage_seed(std::uint64_t root, std::string_view stage) {
    return mix_u64(root ^ fnv1a64(stage));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace lcrec
