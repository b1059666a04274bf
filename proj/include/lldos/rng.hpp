#pragma once

#include <cmath>
#include <cstdint>

namespace lldos {

// Counter-based pseudo-random stream. Every draw is a pure function of
// (seed, realization, stream, counter), so realizations are reproducible
// independent of scheduling order and worker count.
class CounterRng {
public:
    // Stream identifiers keep independent uses of the same realization apart.
    enum Stream : std::uint64_t {
        kFieldModes   = 0x1,
        kExactNormals = 0x2,
        kVariational  = 0x3,
        kGeneric      = 0x4,
    };

    CounterRng(std::uint64_t seed, std::uint64_t realization, std::uint64_t stream)
        : key_(mix(mix(mix(0x9e3779b97f4a7c15ULL ^ seed) + realization) + stream)),
          counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on (0,1]; never returns 0 so logs are safe.
    double next_uniform() {
        const std::uint64_t r = next_u64() >> 11;
        return (static_cast<double>(r) + 1.0) * 0x1.0p-53;
    }

    double next_angle() { return 2.0 * M_PI * (next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; pairs are kept to preserve the counter
    // correspondence between draws.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = next_uniform();
        const double v = next_angle();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(v);
        have_spare_ = true;
        return r * std::cos(v);
    }

    // Unit-rate exponential.
    double next_exponential() { return -std::log(next_uniform()); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lldos
