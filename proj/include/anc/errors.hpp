#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anc {

/// Malformed input data: bad file, bad band, bad key, violated invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A signal sample that must be finite is not.
class CorruptSignalError : public std::runtime_error {
public:
    explicit CorruptSignalError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive weights left the finite domain; carries the first bad sample index.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::int64_t sample)
        : std::runtime_error(what), sample_(sample) {}
    std::int64_t sample() const noexcept { return sample_; }

private:
    std::int64_t sample_;
};

/// Degenerate numerics in the closed-form solver (singular system, failed bracket).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace anc
