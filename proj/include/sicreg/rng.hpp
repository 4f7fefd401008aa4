#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sicreg {

namespace detail {

// Finalizer from SplitMix64; also used to derive independent stream keys.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// xoshiro256++ seeded through SplitMix64. Streams for (seed, a, b) keys are
// derived by hashing the key words, so parallel consumers of different keys
// get statistically independent, platform-stable sequences.
class Rng {
  public:
    explicit Rng(uint64_t seed) { seed_state(seed); }

    // Independent stream keyed by (seed, a, b); used per (sample-size index,
    // replicate) so results do not depend on execution order.
    static Rng stream(uint64_t seed, uint64_t a, uint64_t b) {
        uint64_t h = detail::mix64(seed);
        h = detail::mix64(h ^ (0x9e3779b97f4a7c15ULL * (a + 1)));
        h = detail::mix64(h ^ (0xc2b2ae3d27d4eb4fULL * (b + 1)));
        Rng r(0);
        r.seed_state(h);
        return r;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0, 1]
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    bool bernoulli(double prob) { return uniform() < prob; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void seed_state(uint64_t seed) {
        uint64_t h = seed;
        for (auto& word : s_) {
            h = detail::mix64(h);
            word = h;
        }
        // xoshiro must not start from the all-zero state
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace sicreg
