#pragma once

#include <cmath>
#include <cstdint>

// Counter-derived substreams on top of xoshiro256++. Every stream is a pure
// function of the integers fed to derive_seed, so replicas and noise modes
// can be generated in any order (or on any thread) with identical results.

namespace fracftle::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hash a seed together with stream tags (mode index, replica index, ...)
/// into an independent substream seed.
template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, Tags... tags) {
    std::uint64_t state = seed ^ 0x6a09e667f3bcc908ULL;
    (void)splitmix64(state);
    ((state ^= splitmix64(state) + static_cast<std::uint64_t>(tags),
      (void)splitmix64(state)),
     ...);
    return splitmix64(state);
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0,1].
    double next_uniform() {
        const std::uint64_t bits = next() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// N(0,1) sampler, Box-Muller with a cached spare. Hand-rolled so the byte
/// stream does not depend on the standard library implementation.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = gen_.next_uniform();
        const double u2 = gen_.next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    Xoshiro256pp gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags; keep values distinct so substreams never collide.
inline constexpr std::uint64_t kModeStream = 0x1001;
inline constexpr std::uint64_t kReplicaStream = 0x2002;
inline constexpr std::uint64_t kInitialDataStream = 0x3003;
inline constexpr std::uint64_t kPthetaStream = 0x4004;

}  // namespace fracftle::rng
