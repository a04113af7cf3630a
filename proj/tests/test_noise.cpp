#include "anc/errors.hpp"
#include "anc/noise.hpp"
#include "anc/rng.hpp"
#include "anc/wav.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <numeric>

using namespace anc;

namespace {

double variance(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(x.size());
}

} // namespace

TEST_CASE("gen_bandlimited with n = 0 returns an empty sequence") {
    CHECK(gen_bandlimited(1, 800, 7200, 16000, 0, 1.0).empty());
}

TEST_CASE("gen_bandlimited is deterministic in the seed") {
    const auto a = gen_bandlimited(7, 800, 7200, 16000, 4096, 0.5);
    const auto b = gen_bandlimited(7, 800, 7200, 16000, 4096, 0.5);
    CHECK(a == b);
    const auto c = gen_bandlimited(8, 800, 7200, 16000, 4096, 0.5);
    CHECK(a != c);
}

TEST_CASE("gen_bandlimited hits the target variance and the stopband floor") {
    const double fs = 16000.0, target = 0.305;
    const auto x = gen_bandlimited(7, 800, 7200, fs, std::size_t{1} << 16, target);

    CHECK(variance(x) == doctest::Approx(target).epsilon(0.01));

    const double inband = testutil::band_power(x, fs, 800, 7200);
    const double below = testutil::band_power(x, fs, 10, 400);
    const double above = testutil::band_power(x, fs, 7600, 7990);
    CHECK(10.0 * std::log10(inband / below) >= 40.0);
    CHECK(10.0 * std::log10(inband / above) >= 40.0);
}

TEST_CASE("gen_bandlimited rejects invalid bands") {
    CHECK_THROWS_AS(gen_bandlimited(1, 0.0, 7200, 16000, 16, 1.0), ConfigError);
    CHECK_THROWS_AS(gen_bandlimited(1, 800, 8000, 16000, 16, 1.0), ConfigError);
    CHECK_THROWS_AS(gen_bandlimited(1, 900, 800, 16000, 16, 1.0), ConfigError);
    CHECK_THROWS_AS(gen_bandlimited(1, 800, 7200, 16000, 16, 0.0), ConfigError);
}

TEST_CASE("load_recording scales integer PCM by 1/32768") {
    testutil::TempDir dir("pcm");
    write_wav_pcm16(dir.file("one.wav"), {0.5}, 16000);
    const auto rec = load_recording(dir.file("one.wav"));
    REQUIRE(rec.samples.size() == 1);
    CHECK(rec.samples[0] == 0.5); // 16384 / 32768
    CHECK(rec.sample_rate == 16000);
}

TEST_CASE("load_recording reads one sample per CSV line") {
    testutil::TempDir dir("csv");
    {
        std::ofstream out(dir.file("x.csv"));
        out << "0.0\n1.0\n-1.0\n";
    }
    const auto rec = load_recording(dir.file("x.csv"));
    CHECK(rec.samples == std::vector<double>{0.0, 1.0, -1.0});
    CHECK(rec.sample_rate == 0);
}

TEST_CASE("CSV samples survive a write/load round trip") {
    testutil::TempDir dir("rt");
    GaussianRng rng(11);
    std::vector<double> x(257);
    for (double& v : x) v = rng.next();
    write_sample_csv(dir.file("rt.csv"), x);
    const auto rec = load_recording(dir.file("rt.csv"));
    REQUIRE(rec.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(rec.samples[i] - x[i]) <= 1e-12 * std::abs(x[i]));
}

TEST_CASE("float32 WAV round trip is exact at float precision") {
    testutil::TempDir dir("f32");
    std::vector<double> x = {0.125, -0.5, 0.7499999, 0.0};
    write_wav_float32(dir.file("f.wav"), x, 16000);
    const auto rec = load_recording(dir.file("f.wav"));
    REQUIRE(rec.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(rec.samples[i] == static_cast<double>(static_cast<float>(x[i])));
}

TEST_CASE("WAV loader skips unknown chunks and rejects broken layouts") {
    testutil::TempDir dir("wav");

    // Extra chunk between fmt and data.
    {
        write_wav_pcm16(dir.file("base.wav"), {0.25, -0.25}, 16000);
        std::ifstream in(dir.file("base.wav"), std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        std::vector<char> padded(bytes.begin(), bytes.begin() + 36); // through fmt
        const char junk[] = {'j', 'u', 'n', 'k', 4, 0, 0, 0, 1, 2, 3, 4};
        padded.insert(padded.end(), junk, junk + sizeof(junk));
        padded.insert(padded.end(), bytes.begin() + 36, bytes.end());
        const std::uint32_t riff_len = static_cast<std::uint32_t>(padded.size() - 8);
        std::memcpy(padded.data() + 4, &riff_len, 4);
        std::ofstream out(dir.file("junk.wav"), std::ios::binary);
        out.write(padded.data(), static_cast<std::streamsize>(padded.size()));
    }
    const auto rec = load_recording(dir.file("junk.wav"));
    REQUIRE(rec.samples.size() == 2);
    CHECK(rec.samples[0] == doctest::Approx(0.25).epsilon(1e-4));

    // Truncated data chunk.
    {
        std::ifstream in(dir.file("base.wav"), std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() - 2);
        std::ofstream out(dir.file("trunc.wav"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    CHECK_THROWS_AS(load_recording(dir.file("trunc.wav")), ConfigError);

    // Stereo is unsupported.
    {
        std::ifstream in(dir.file("base.wav"), std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        bytes[22] = 2; // channel count
        std::ofstream out(dir.file("stereo.wav"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    CHECK_THROWS_AS(load_recording(dir.file("stereo.wav")), ConfigError);

    CHECK_THROWS_AS(load_recording(dir.file("missing.wav")), ConfigError);
}

TEST_CASE("compose_timeline replace mode switches the source power") {
    ReferenceTimeline t;
    t.fs_hz = 8000;
    t.duration_s = 8;
    t.seed = 3;
    t.stages.push_back({BandlimitedSource{400, 3600, 0.305}, 0.0, StageMode::replace});
    t.stages.push_back({BandlimitedSource{400, 3600, 0.540}, 4.0, StageMode::replace});
    const auto x = compose_timeline(t);
    REQUIRE(x.size() == 64000);
    const std::vector<double> head(x.begin(), x.begin() + 32000);
    const std::vector<double> tail(x.begin() + 32000, x.end());
    CHECK(variance(head) == doctest::Approx(0.305).epsilon(0.02));
    CHECK(variance(tail) == doctest::Approx(0.540).epsilon(0.02));
}

TEST_CASE("compound mode adds an independent source") {
    ReferenceTimeline t;
    t.fs_hz = 8000;
    t.duration_s = 8;
    t.seed = 5;
    const double v1 = 0.4, v2 = 0.7;
    t.stages.push_back({BandlimitedSource{400, 3600, v1}, 0.0, StageMode::replace});
    t.stages.push_back({BandlimitedSource{400, 3600, v2}, 4.0, StageMode::compound});
    const auto x = compose_timeline(t);

    const std::vector<double> head(x.begin(), x.begin() + 32000);
    const std::vector<double> tail(x.begin() + 32000, x.end());
    CHECK(variance(head) == doctest::Approx(v1).epsilon(0.02));
    CHECK(variance(tail) == doctest::Approx(v1 + v2).epsilon(0.02));

    // Exact additivity: the compound span equals the first source plus the
    // second source generated on its own substream.
    const auto second = gen_bandlimited(mix_seed(t.seed, 1), 400, 3600, t.fs_hz, 32000, v2);
    ReferenceTimeline only_first = t;
    only_first.stages.pop_back();
    const auto base = compose_timeline(only_first);
    for (std::size_t k = 0; k < 32000; ++k)
        CHECK(x[32000 + k] == base[32000 + k] + second[k]);
}

TEST_CASE("compose_timeline rejects degenerate stage lists") {
    ReferenceTimeline t;
    t.fs_hz = 8000;
    t.duration_s = 1;
    CHECK_THROWS_AS(compose_timeline(t), ConfigError);

    t.stages.push_back({BandlimitedSource{400, 3600, 1.0}, 0.5, StageMode::replace});
    CHECK_THROWS_AS(compose_timeline(t), ConfigError); // first stage must start at 0
}

TEST_CASE("recordings shorter than their span or off-rate are rejected") {
    testutil::TempDir dir("rec");
    write_wav_pcm16(dir.file("short.wav"), std::vector<double>(100, 0.1), 8000);
    write_wav_pcm16(dir.file("off.wav"), std::vector<double>(8000, 0.1), 44100);

    ReferenceTimeline t;
    t.fs_hz = 8000;
    t.duration_s = 1;
    t.stages.push_back({RecordingSource{dir.file("short.wav"), 1.0}, 0.0, StageMode::replace});
    CHECK_THROWS_WITH_AS(compose_timeline(t), doctest::Contains("insufficient"), ConfigError);

    t.stages[0].source = RecordingSource{dir.file("off.wav"), 1.0};
    CHECK_THROWS_WITH_AS(compose_timeline(t), doctest::Contains("does not match"), ConfigError);
}
