#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace anc {

/// splitmix64 step; used to derive independent substream seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded Gaussian source. Box-Muller is spelled out here so the sample stream
/// is pinned by this code alone, not by the standard library's distribution
/// implementation (std::normal_distribution varies between stdlibs).
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    double uniform01() {
        // 53-bit mantissa from the top bits
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    static constexpr double pi = 3.14159265358979323846;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace anc
