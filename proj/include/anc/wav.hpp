#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anc {

struct Recording {
    std::vector<double> samples;
    /// Sample rate declared by the file; 0 for CSV (the caller's clock applies).
    std::uint32_t sample_rate = 0;
};

/// Load a mono recording. ".wav" accepts PCM16 or IEEE float32, little-endian,
/// with unknown RIFF chunks skipped; integer PCM is scaled to [-1, 1] by
/// 1/32768. Any other extension is read as plain text, one sample per line.
/// Throws ConfigError on unsupported layouts or truncated data.
Recording load_recording(const std::string& path);

/// Write a mono IEEE float32 WAV with the canonical 44-byte header.
void write_wav_float32(const std::string& path, const std::vector<double>& samples,
                       std::uint32_t sample_rate);

/// Write a mono PCM16 WAV; samples are clipped to [-1, 1] and scaled by 32768.
void write_wav_pcm16(const std::string& path, const std::vector<double>& samples,
                     std::uint32_t sample_rate);

/// Write samples as text, one per line, shortest round-trip formatting.
void write_sample_csv(const std::string& path, const std::vector<double>& samples);

} // namespace anc
