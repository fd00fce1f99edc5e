#pragma once

#include <cstdint>
#include <random>

namespace steinbias {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Substream seed for index `index` under master seed `seed`.
/// derive_seed(s, i) = mix64(s ^ mix64(i + 0x632be59bd9b4e019)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// A seeded random stream. Thin wrapper over std::mt19937_64 with the two
/// draws every sampler in the library needs.
class Rng {
public:
    using engine_type = std::mt19937_64;
    using result_type = engine_type::result_type;

    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    /// Independent child stream; children with distinct indices never collide.
    Rng split(std::uint64_t index) { return Rng(derive_seed(engine_(), index)); }

    /// Uniform on [0, 1), 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound). bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Lemire's nearly-divisionless rejection.
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    engine_type& engine() noexcept { return engine_; }

    // UniformRandomBitGenerator interface so std distributions accept an Rng.
    static constexpr result_type min() { return engine_type::min(); }
    static constexpr result_type max() { return engine_type::max(); }
    result_type operator()() { return engine_(); }

private:
    engine_type engine_;
};

}  // namespace steinbias
