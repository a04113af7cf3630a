#include "anc/wav.hpp"

#include "anc/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace anc {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void wr_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open recording: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

Recording load_wav(const std::string& path) {
    const auto bytes = read_all(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ConfigError(path + ": not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::size_t data_off = 0, data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t len = rd_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + len > bytes.size())
            throw ConfigError(path + ": truncated chunk '" + std::string(id, 4) + "'");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw ConfigError(path + ": fmt chunk too short");
            format = rd_u16(bytes.data() + body);
            channels = rd_u16(bytes.data() + body + 2);
            rate = rd_u32(bytes.data() + body + 4);
            bits = rd_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = len;
        }
        pos = body + len + (len & 1); // chunks are word-aligned
    }
    if (!have_fmt || data_off == 0) throw ConfigError(path + ": missing fmt or data chunk");
    if (channels != 1) throw ConfigError(path + ": only mono recordings are supported");

    Recording rec;
    rec.sample_rate = rate;
    if (format == 1 && bits == 16) {
        const std::size_t n = data_len / 2;
        rec.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint16_t u = rd_u16(bytes.data() + data_off + 2 * i);
            rec.samples[i] = static_cast<double>(static_cast<std::int16_t>(u)) / 32768.0;
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t n = data_len / 4;
        rec.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t u = rd_u32(bytes.data() + data_off + 4 * i);
            rec.samples[i] = static_cast<double>(std::bit_cast<float>(u));
        }
    } else {
        throw ConfigError(path + ": unsupported WAV encoding (need PCM16 or float32)");
    }
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (!std::isfinite(rec.samples[i]))
            throw ConfigError(path + ": non-finite sample at index " + std::to_string(i));
    }
    return rec;
}

Recording load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open recording: " + path);
    Recording rec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // trim
        std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t");
        double v = 0.0;
        const char* first = line.data() + a;
        const char* last = line.data() + b + 1;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" +
                              line.substr(a, b - a + 1) + "'");
        if (!std::isfinite(v))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": non-finite sample");
        rec.samples.push_back(v);
    }
    return rec;
}

void write_wav_header(std::ofstream& out, std::uint16_t format, std::uint16_t bits,
                      std::uint32_t rate, std::uint32_t data_bytes) {
    out.write("RIFF", 4);
    wr_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    wr_u32(out, 16);
    wr_u16(out, format);
    wr_u16(out, 1); // mono
    wr_u32(out, rate);
    wr_u32(out, rate * (bits / 8u));
    wr_u16(out, static_cast<std::uint16_t>(bits / 8));
    wr_u16(out, bits);
    out.write("data", 4);
    wr_u32(out, data_bytes);
}

} // namespace

Recording load_recording(const std::string& path) {
    const bool is_wav =
        path.size() >= 4 && (path.compare(path.size() - 4, 4, ".wav") == 0 ||
                             path.compare(path.size() - 4, 4, ".WAV") == 0);
    return is_wav ? load_wav(path) : load_csv(path);
}

void write_wav_float32(const std::string& path, const std::vector<double>& samples,
                       std::uint32_t sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write: " + path);
    write_wav_header(out, 3, 32, sample_rate, static_cast<std::uint32_t>(samples.size() * 4));
    for (double v : samples) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        unsigned char b[4] = {static_cast<unsigned char>(u), static_cast<unsigned char>(u >> 8),
                              static_cast<unsigned char>(u >> 16),
                              static_cast<unsigned char>(u >> 24)};
        out.write(reinterpret_cast<const char*>(b), 4);
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_wav_pcm16(const std::string& path, const std::vector<double>& samples,
                     std::uint32_t sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write: " + path);
    write_wav_header(out, 1, 16, sample_rate, static_cast<std::uint32_t>(samples.size() * 2));
    for (double v : samples) {
        double x = v * 32768.0;
        if (x > 32767.0) x = 32767.0;
        if (x < -32768.0) x = -32768.0;
        const auto s = static_cast<std::int16_t>(std::lrint(x));
        wr_u16(out, static_cast<std::uint16_t>(s));
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_sample_csv(const std::string& path, const std::vector<double>& samples) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    char buf[64];
    for (double v : samples) {
        auto r = std::to_chars(buf, buf + sizeof(buf), v);
        out.write(buf, r.ptr - buf);
        out.put('\n');
    }
    if (!out) throw ConfigError("write failed: " + path);
}

} // namespace anc
