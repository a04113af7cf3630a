#include "anc/noise.hpp"

#include "anc/errors.hpp"
#include "anc/rng.hpp"
#include "anc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace anc {

namespace {

constexpr std::size_t kBandpassTaps = 255;

std::vector<double> hamming_sinc_bandpass(double lo_hz, double hi_hz, double fs_hz) {
    const double w1 = 2.0 * M_PI * lo_hz / fs_hz;
    const double w2 = 2.0 * M_PI * hi_hz / fs_hz;
    const auto n = kBandpassTaps;
    const double c = (n - 1) / 2.0;
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) - c;
        double ideal;
        if (t == 0.0) {
            ideal = (w2 - w1) / M_PI;
        } else {
            ideal = (std::sin(w2 * t) - std::sin(w1 * t)) / (M_PI * t);
        }
        const double win = 0.54 - 0.46 * std::cos(2.0 * M_PI * k / (n - 1));
        h[k] = ideal * win;
    }
    return h;
}

void check_band(double lo_hz, double hi_hz, double fs_hz, const std::string& what) {
    if (!(fs_hz > 0.0)) throw ConfigError(what + ": sample rate must be positive");
    if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs_hz / 2.0))
        throw ConfigError(what + ": band must satisfy 0 < lo < hi < fs/2 (got lo=" +
                          std::to_string(lo_hz) + ", hi=" + std::to_string(hi_hz) +
                          ", fs=" + std::to_string(fs_hz) + ")");
}

/// Rescale in place so the empirical second moment equals `variance` exactly.
void rescale_to_variance(std::vector<double>& x, double variance) {
    if (x.empty()) return;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    const double emp = acc / static_cast<double>(x.size());
    if (emp <= 0.0) throw ConfigError("bandlimited synthesis produced a silent stream");
    const double scale = std::sqrt(variance / emp);
    for (double& v : x) v *= scale;
}

} // namespace

std::vector<double> gen_bandlimited(std::uint64_t seed, double lo_hz, double hi_hz, double fs_hz,
                                    std::size_t n, double variance) {
    check_band(lo_hz, hi_hz, fs_hz, "gen_bandlimited");
    if (!(variance > 0.0)) throw ConfigError("gen_bandlimited: variance must be positive");
    if (n == 0) return {};

    const auto h = hamming_sinc_bandpass(lo_hz, hi_hz, fs_hz);
    const std::size_t warmup = h.size();

    GaussianRng rng(seed);
    std::vector<double> g(n + warmup);
    for (double& v : g) v = rng.next();

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const std::size_t base = i + warmup;
        for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * g[base - k];
        y[i] = acc;
    }
    rescale_to_variance(y, variance);
    return y;
}

void validate_timeline(const ReferenceTimeline& t, const std::string& prefix) {
    if (!(t.fs_hz > 0.0)) throw ConfigError(prefix + "fs_hz: must be positive");
    if (!(t.duration_s > 0.0)) throw ConfigError(prefix + "duration_s: must be positive");
    if (t.stages.empty()) throw ConfigError(prefix + "stages: at least one stage is required");
    double prev = -1.0;
    for (std::size_t i = 0; i < t.stages.size(); ++i) {
        const auto& st = t.stages[i];
        const std::string key = prefix + "stage." + std::to_string(i) + ".";
        if (i == 0 && st.start_s != 0.0) throw ConfigError(key + "start_s: first stage must start at 0");
        if (st.start_s < 0.0) throw ConfigError(key + "start_s: must be >= 0");
        if (st.start_s <= prev) throw ConfigError(key + "start_s: stage starts must strictly increase");
        if (st.start_s >= t.duration_s)
            throw ConfigError(key + "start_s: stage starts beyond the timeline duration");
        prev = st.start_s;
        if (const auto* b = std::get_if<BandlimitedSource>(&st.source)) {
            check_band(b->lo_hz, b->hi_hz, t.fs_hz, key + "band");
            if (!(b->variance > 0.0)) throw ConfigError(key + "variance: must be positive");
        } else {
            const auto& r = std::get<RecordingSource>(st.source);
            if (r.path.empty()) throw ConfigError(key + "file: recording path is empty");
            if (!std::isfinite(r.gain)) throw ConfigError(key + "gain: must be finite");
        }
    }
}

std::vector<double> compose_timeline(const ReferenceTimeline& t) {
    validate_timeline(t);
    const auto total = static_cast<std::size_t>(std::llround(t.fs_hz * t.duration_s));
    std::vector<double> out(total, 0.0);

    // Per stage: its source runs from its own start until the next `replace`
    // stage (or the end). Compound stages keep earlier sources alive.
    const std::size_t n_stages = t.stages.size();
    for (std::size_t i = 0; i < n_stages; ++i) {
        const auto& st = t.stages[i];
        const auto start = static_cast<std::size_t>(std::llround(st.start_s * t.fs_hz));
        std::size_t stop = total;
        for (std::size_t j = i + 1; j < n_stages; ++j) {
            if (t.stages[j].mode == StageMode::replace) {
                stop = static_cast<std::size_t>(std::llround(t.stages[j].start_s * t.fs_hz));
                break;
            }
        }
        if (stop <= start) continue;
        const std::size_t span = stop - start;

        std::vector<double> src;
        if (const auto* b = std::get_if<BandlimitedSource>(&st.source)) {
            src = gen_bandlimited(mix_seed(t.seed, i), b->lo_hz, b->hi_hz, t.fs_hz, span,
                                  b->variance);
        } else {
            const auto& r = std::get<RecordingSource>(st.source);
            Recording rec = load_recording(r.path);
            if (rec.sample_rate != 0 &&
                rec.sample_rate != static_cast<std::uint32_t>(std::llround(t.fs_hz)))
                throw ConfigError(r.path + ": recording rate " + std::to_string(rec.sample_rate) +
                                  " Hz does not match timeline rate " +
                                  std::to_string(static_cast<long long>(t.fs_hz)) + " Hz");
            if (rec.samples.size() < span)
                throw ConfigError(r.path + ": recording has " + std::to_string(rec.samples.size()) +
                                  " samples but the stage spans " + std::to_string(span) +
                                  " (insufficient recording; looping is not supported)");
            src.resize(span);
            for (std::size_t k = 0; k < span; ++k) src[k] = rec.samples[k] * r.gain;
        }
        for (std::size_t k = 0; k < span; ++k) out[start + k] += src[k];
    }
    return out;
}

} // namespace anc
