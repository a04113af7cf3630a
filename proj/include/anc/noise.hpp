#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace anc {

struct BandlimitedSource {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
    double variance = 0.0;
};

struct RecordingSource {
    std::string path;
    double gain = 1.0;
};

enum class StageMode { replace, compound };

/// One disturbance stage: a source that switches on at `start_s`, either
/// replacing everything before it or summing on top of the running mixture.
struct NoiseStage {
    std::variant<BandlimitedSource, RecordingSource> source;
    double start_s = 0.0;
    StageMode mode = StageMode::replace;
};

struct ReferenceTimeline {
    double fs_hz = 0.0;
    double duration_s = 0.0;
    std::vector<NoiseStage> stages;
    std::uint64_t seed = 1;
};

/// n samples of zero-mean noise band-limited to [lo, hi], rescaled so the
/// empirical variance equals `variance` exactly. Deterministic in the seed.
/// Synthesis: unit Gaussian noise through a 255-tap Hamming windowed-sinc
/// bandpass, with the filter's warm-up span discarded.
std::vector<double> gen_bandlimited(std::uint64_t seed, double lo_hz, double hi_hz, double fs_hz,
                                    std::size_t n, double variance);

/// Materialize the full reference sequence, length fs*duration. Stage sources
/// are generated on independent seed substreams. A recording shorter than its
/// active span is an error (no looping), as is a WAV whose declared rate
/// differs from the timeline's.
std::vector<double> compose_timeline(const ReferenceTimeline& timeline);

/// Validate stage/timeline invariants; throws ConfigError with the offending
/// field named as `prefix` + field.
void validate_timeline(const ReferenceTimeline& timeline, const std::string& prefix = "timeline.");

} // namespace anc
