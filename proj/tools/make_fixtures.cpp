// Deterministically synthesizes the data files used by the four-stage
// compounding scenario: a pair of duct-style impulse responses (the primary
// path factors through the secondary section, so the ideal control filter is
// realizable by the configured tap count) and two non-stationary recordings.
//
// Usage: make_fixtures <output-dir>

#include "anc/errors.hpp"
#include "anc/noise.hpp"
#include "anc/rng.hpp"
#include "anc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <vector>

namespace {

constexpr double kFs = 16000.0;

/// Duct-style FIR: a direct arrival after an acoustic delay plus an
/// exponentially decaying diffuse tail, normalized to the requested energy.
/// The direct arrival keeps `direct_frac` of the energy, which bounds the
/// tail's frequency response well below the direct gain at every frequency.
std::vector<double> duct_response(std::uint64_t seed, std::size_t taps, std::size_t delay,
                                  double direct_frac, double tail_tau, double energy) {
    anc::GaussianRng rng(seed);
    std::vector<double> h(taps, 0.0);
    h[delay] = 1.0;
    h[delay + 1] = 0.35;
    const double e_direct = 1.0 + 0.35 * 0.35;

    std::vector<double> tail(taps, 0.0);
    double e_tail = 0.0;
    for (std::size_t k = delay + 2; k < taps; ++k) {
        const double decay = std::exp(-static_cast<double>(k - delay) / tail_tau);
        tail[k] = decay * rng.next();
        e_tail += tail[k] * tail[k];
    }
    const double tail_scale = std::sqrt(e_direct * (1.0 - direct_frac) / (direct_frac * e_tail));
    for (std::size_t k = 0; k < taps; ++k) h[k] += tail_scale * tail[k];

    double e = 0.0;
    for (double v : h) e += v * v;
    const double scale = std::sqrt(energy / e);
    for (double& v : h) v *= scale;
    return h;
}

double min_inband_gain(const std::vector<double>& h, double lo_hz, double hi_hz) {
    double lo = 1e300;
    for (double f = lo_hz; f <= hi_hz; f += 10.0) {
        std::complex<double> acc{0.0, 0.0};
        const double w = 2.0 * M_PI * f / kFs;
        for (std::size_t k = 0; k < h.size(); ++k)
            acc += h[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
        lo = std::min(lo, std::abs(acc));
    }
    return lo;
}

void normalize_rms(std::vector<double>& x, double rms) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    const double scale = rms / std::sqrt(acc / static_cast<double>(x.size()));
    for (double& v : x) v *= scale;
}

/// Low-frequency machinery bed with repetitive impact bursts.
std::vector<double> construction_noise(std::uint64_t seed, double seconds) {
    const auto n = static_cast<std::size_t>(seconds * kFs);
    auto x = anc::gen_bandlimited(anc::mix_seed(seed, 1), 70.0, 400.0, kFs, n, 1.0);

    anc::GaussianRng rng(anc::mix_seed(seed, 2));
    double t = 0.3;
    while (t < seconds - 0.2) {
        const auto start = static_cast<std::size_t>(t * kFs);
        const double freq = 80.0 + 60.0 * std::abs(rng.next()) / 2.0;
        const double amp = 2.0 + 1.2 * std::abs(rng.next());
        const double tau = 0.045 * kFs;
        const auto burst_len = static_cast<std::size_t>(0.25 * kFs);
        for (std::size_t k = 0; k < burst_len && start + k < n; ++k) {
            const double kk = static_cast<double>(k);
            x[start + k] += amp * std::exp(-kk / tau) * std::sin(2.0 * M_PI * freq * kk / kFs);
        }
        t += 0.38 + 0.12 * std::abs(rng.next());
    }
    normalize_rms(x, 0.125);
    return x;
}

/// Mid-band noise under a slow flyover swell with mild amplitude modulation.
std::vector<double> aircraft_noise(std::uint64_t seed, double seconds) {
    const auto n = static_cast<std::size_t>(seconds * kFs);
    auto x = anc::gen_bandlimited(anc::mix_seed(seed, 3), 400.0, 3500.0, kFs, n, 1.0);
    const double peak_t = 0.5 * seconds;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / kFs;
        const double swell = 0.3 + 1.7 * std::exp(-std::pow((t - peak_t) / 6.0, 2.0));
        const double am = 1.0 + 0.15 * std::sin(2.0 * M_PI * 0.31 * t);
        x[k] *= swell * am;
    }
    normalize_rms(x, 0.125);
    return x;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    try {
        // Secondary section: 320 taps, ~1.5 ms travel, Gs (white) = 0.5.
        const auto s = duct_response(0xd0c7001ULL, 320, 24, 0.93, 48.0, 0.5);
        // Extra duct section between the secondary source and the error
        // sensor; the primary path is the cascade of the two, which keeps the
        // ideal control filter at the section length (192 taps).
        const auto q = duct_response(0xd0c7002ULL, 192, 16, 0.93, 40.0, 1.5);
        std::vector<double> p(s.size() + q.size() - 1, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) p[i + j] += s[i] * q[j];

        // Guard against spectral nulls that would make the constrained
        // problem degenerate in the bands the scenarios use.
        const double s_floor = min_inband_gain(s, 70.0, 3500.0);
        const double q_floor = min_inband_gain(q, 70.0, 3500.0);
        if (s_floor < 0.18 || q_floor < 0.2) {
            std::cerr << "fixture seeds produced a deep spectral null (s=" << s_floor
                      << ", q=" << q_floor << ")\n";
            return 1;
        }

        anc::write_sample_csv((dir / "duct_s.csv").string(), s);
        anc::write_sample_csv((dir / "duct_p.csv").string(), p);
        anc::write_wav_float32((dir / "construction.wav").string(),
                               construction_noise(0xc0475ULL, 62.0), 16000);
        anc::write_wav_float32((dir / "aircraft.wav").string(), aircraft_noise(0xa1137ULL, 32.0),
                               16000);
    } catch (const std::exception& ex) {
        std::cerr << "make_fixtures: " << ex.what() << "\n";
        return 1;
    }
    std::cout << "fixtures written to " << dir.string() << "\n";
    return 0;
}
