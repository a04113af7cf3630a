#pragma once

#include "anc/dsp.hpp"

namespace anc {

struct PenaltyConfig {
    std::size_t window = 1024;  // K
    double eps1 = 1e-12;        // floor on the x'^2 window sum
    double eps2 = 1e-12;        // floor on the x^2 window sum
    double rho2 = 1.0;          // max allowed output power
};

/// Streaming estimator for the secondary-path power gain and the per-sample
/// variable penalty factor. Feed estimate_gs then variable_penalty once per
/// sample, in that order.
class PenaltyEstimator {
public:
    explicit PenaltyEstimator(const PenaltyConfig& cfg);

    /// Push this sample's reference and filtered reference; returns
    /// G_hat(n) = max(sum x'^2, eps1) / max(sum x^2, eps2).
    double estimate_gs(double x_n, double xprime_n);

    /// Push this sample's estimated disturbance; returns
    /// alpha(n) = max(G_hat * (sqrt(sum d_hat^2 / (K rho^2 G_hat)) - 1), 0).
    double variable_penalty(double d_hat_n);

    double last_gs() const noexcept { return last_gs_; }
    const PenaltyConfig& config() const noexcept { return cfg_; }

private:
    PenaltyConfig cfg_;
    WindowedPower sum_x2_;
    WindowedPower sum_xp2_;
    WindowedPower sum_dhat2_;
    double last_gs_;
};

struct OfflinePenaltyInput {
    double sigma_d2 = 0.0; // disturbance variance
    double gs = 0.0;       // secondary-path power gain
    double rho2 = 0.0;     // max allowed output power
};

/// Closed-form optimal penalty factor:
/// max(G_s * (sqrt(sigma_d^2 / (rho^2 G_s)) - 1), 0).
double offline_penalty(const OfflinePenaltyInput& in);

} // namespace anc
