// rng.hpp: seedable, reproducible random number generation.
//
// Every random draw in the library flows from one 64-bit master seed.
// Independent streams are derived from the master seed plus a list of
// integer tags (purpose, timestep, customer, coalition mask, ...) so that
// results never depend on evaluation order.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace loadshare {

// splitmix64 finalizer; used for seed expansion and tag folding.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds tags into a seed; the value that Rng::derive feeds its generator.
// Exposed so call sites can hand a derived seed to an API that reseeds
// internally without correlating with any other stream.
constexpr std::uint64_t derive_seed(
    std::uint64_t master_seed,
    std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = mix64(master_seed);
    for (std::uint64_t t : tags) h = mix64(h ^ mix64(t));
    return h;
}

// xoshiro256++ with splitmix64 seeding.
//
// Stream derivation rule: start from h = mix64(master_seed), then fold each
// tag t as h = mix64(h ^ mix64(t)). The folded value seeds the generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        // splitmix64 sequence; guarantees a nonzero xoshiro state
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    static Rng derive(std::uint64_t master_seed,
                      std::initializer_list<std::uint64_t> tags) noexcept {
        return Rng(derive_seed(master_seed, tags));
    }

    std::uint64_t next_u64() noexcept {
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

    // Uniform on the open interval (0,1): 2^53 equispaced midpoints,
    // so neither endpoint can ever be returned.
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_unit();
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Purpose tags for stream derivation. Keep values stable: they are part of
// the reproducibility contract.
namespace stream_tag {
inline constexpr std::uint64_t alpha = 1;        // schedulable share draw
inline constexpr std::uint64_t disclosure = 2;   // realized schedulable load
inline constexpr std::uint64_t coalition_mc = 3; // per-coalition MC expectation
inline constexpr std::uint64_t grid_point = 4;   // per-grid-point MC stream
inline constexpr std::uint64_t profile = 5;      // synthetic profile shape
inline constexpr std::uint64_t comparison = 6;   // method-comparison realizations
inline constexpr std::uint64_t grid_check = 7;   // per-timestep grid validation
}  // namespace stream_tag

}  // namespace loadshare
