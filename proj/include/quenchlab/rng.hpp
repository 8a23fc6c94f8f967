#ifndef QUENCHLAB_RNG_HPP
#define QUENCHLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace quenchlab {

// SplitMix64 mixing step. Used to derive independent sub-stream seeds from a
// base seed (e.g. one seed per disorder realization) without overlap.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// k-th derived seed of a base seed. derive_seed(s, 0) != s on purpose, so a
// single-realization run and "realization 0 of many" share nothing by accident.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
    std::uint64_t s = base;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= k; ++i) out = splitmix64(s);
    return out;
}

// Seeded random stream with fixed, implementation-independent algorithms on
// top of std::mt19937_64 (whose output is pinned by the standard). The
// standard library *distributions* are not pinned, so uniform and gaussian
// draws are implemented here explicitly; every run of the artifact produces
// bit-identical streams for equal seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Standard normal via the Marsaglia polar method; the spare value is
    // cached, so draws come in deterministic pairs.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace quenchlab

#endif
