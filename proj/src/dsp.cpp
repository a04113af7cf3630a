#include "anc/dsp.hpp"

#include "anc/errors.hpp"

#include <cmath>
#include <utility>

namespace anc {

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

FirFilter::FirFilter(std::vector<double> taps) : coeffs(std::move(taps)) {
    if (coeffs.empty()) throw ConfigError("FirFilter: needs at least one tap");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!std::isfinite(coeffs[i]))
            throw ConfigError("FirFilter: non-finite coefficient at tap " + std::to_string(i));
    }
}

DelayLine::DelayLine(std::size_t capacity)
    : buf_(next_pow2(capacity == 0 ? 1 : capacity), 0.0), mask_(buf_.size() - 1) {}

void DelayLine::reset() noexcept {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    head_ = 0;
}

double fir_step(const FirFilter& f, const DelayLine& line) noexcept {
    return fir_step(std::span<const double>(f.coeffs), line);
}

double fir_step(std::span<const double> coeffs, const DelayLine& line) noexcept {
    double acc = 0.0;
    for (std::size_t l = 0; l < coeffs.size(); ++l) acc += coeffs[l] * line[l];
    return acc;
}

WindowedPower::WindowedPower(std::size_t window) : squares_(window, 0.0), window_(window) {
    if (window == 0) throw ConfigError("WindowedPower: window must be positive");
}

double WindowedPower::push(double v) {
    if (!std::isfinite(v))
        throw CorruptSignalError("WindowedPower: non-finite sample after " +
                                 std::to_string(pushes_) + " pushes");
    const double sq = v * v;
    sum_ += sq - squares_[pos_];
    squares_[pos_] = sq;
    pos_ = pos_ + 1 == window_ ? 0 : pos_ + 1;
    if ((++pushes_ % refresh_period) == 0) refresh();
    if (sum_ < 0.0) sum_ = 0.0; // only reachable through rounding
    return sum_;
}

void WindowedPower::refresh() noexcept {
    // Neumaier-compensated direct sum of the stored squares.
    double s = 0.0, comp = 0.0;
    for (double sq : squares_) {
        const double t = s + sq;
        comp += (std::abs(s) >= std::abs(sq)) ? (s - t) + sq : (sq - t) + s;
        s = t;
    }
    sum_ = s + comp;
}

void WindowedPower::reset() noexcept {
    std::fill(squares_.begin(), squares_.end(), 0.0);
    pos_ = 0;
    pushes_ = 0;
    sum_ = 0.0;
}

} // namespace anc
