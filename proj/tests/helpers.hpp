#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testutil {

/// Direct-form convolution reference: y[n] = sum_k h[k] x[n-k], x zero-padded
/// on the left. Returns the first x.size() outputs.
inline std::vector<double> direct_convolution(const std::vector<double>& h,
                                              const std::vector<double>& x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size() && k <= n; ++k) acc += h[k] * x[n - k];
        y[n] = acc;
    }
    return y;
}

/// In-place radix-2 FFT; size must be a power of two. Test-only oracle.
inline void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Mean periodogram power per bin over [lo_hz, hi_hz); `x` length must be a
/// power of two.
inline double band_power(const std::vector<double>& x, double fs, double lo_hz, double hi_hz) {
    std::vector<std::complex<double>> a(x.begin(), x.end());
    fft(a);
    const std::size_t n = a.size();
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 1; k < n / 2; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(n);
        if (f >= lo_hz && f < hi_hz) {
            acc += std::norm(a[k]);
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

struct MeanWithError {
    double mean = 0.0;
    double se = 0.0;
};

/// Batch-means standard error; robust to sample autocorrelation shorter than
/// a batch.
inline MeanWithError batch_means(const std::vector<double>& samples, std::size_t batches = 100) {
    const std::size_t per = samples.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < per; ++i) acc += samples[b * per + i];
        means[b] = acc / static_cast<double>(per);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(batches);
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= static_cast<double>(batches - 1);
    return {m, std::sqrt(var / static_cast<double>(batches))};
}

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("anc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string testdata_dir() {
#ifdef ANC_TESTDATA_DIR
    return ANC_TESTDATA_DIR;
#else
    return "scenarios";
#endif
}

} // namespace testutil
