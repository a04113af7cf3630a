#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace anc {

/// Fixed FIR coefficient vector. Stands in for any of the plant/model filters
/// as well as frozen control-filter snapshots.
struct FirFilter {
    std::vector<double> coeffs;

    FirFilter() = default;
    explicit FirFilter(std::vector<double> taps);

    std::size_t length() const noexcept { return coeffs.size(); }
};

/// Ring buffer of recent samples, read newest-first. Reads past the pushed
/// history return zeros (zero initial conditions).
class DelayLine {
public:
    explicit DelayLine(std::size_t capacity);

    void push(double v) noexcept {
        buf_[head_ & mask_] = v;
        ++head_;
    }

    /// k most recent sample, k = 0 is the latest push.
    double operator[](std::size_t k) const noexcept {
        return buf_[(head_ - 1 - k) & mask_];
    }

    std::size_t capacity() const noexcept { return mask_ + 1; }
    std::uint64_t pushes() const noexcept { return head_; }
    void reset() noexcept;

private:
    std::vector<double> buf_;
    std::uint64_t head_ = 0;
    std::uint64_t mask_ = 0;
};

/// Inner product of the filter taps with the newest-first delay-line history:
/// sum_l f_l * line[l].
double fir_step(const FirFilter& f, const DelayLine& line) noexcept;

/// Same inner product against a raw coefficient span (used where the
/// coefficient vector is mutated in place every sample).
double fir_step(std::span<const double> coeffs, const DelayLine& line) noexcept;

/// Sliding sum of the last K squared samples, O(1) per push. The running sum
/// is recomputed from the stored squares every 2^20 pushes to bound float
/// drift; between refreshes the add/subtract error stays below 1e-9 relative.
class WindowedPower {
public:
    explicit WindowedPower(std::size_t window);

    /// Push one sample; returns the updated sum of the K most recent squares.
    /// Throws CorruptSignalError on non-finite input.
    double push(double v);

    double sum() const noexcept { return sum_ < 0.0 ? 0.0 : sum_; }
    double mean() const noexcept { return sum() / static_cast<double>(window_); }
    std::size_t window() const noexcept { return window_; }
    void reset() noexcept;

private:
    void refresh() noexcept;

    std::vector<double> squares_;
    std::size_t window_;
    std::size_t pos_ = 0;
    std::uint64_t pushes_ = 0;
    double sum_ = 0.0;

    static constexpr std::uint64_t refresh_period = 1ULL << 20;
};

} // namespace anc
