#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace anc {

/// Second-order statistics of one stationary operating condition: reference
/// and filtered-reference autocorrelation matrices plus the cross-correlation
/// with the estimated disturbance.
struct CorrelationSet {
    Eigen::MatrixXd rxx;    // E[x x^T], I x I
    Eigen::MatrixXd rxpxp;  // E[x' x'^T], I x I
    Eigen::VectorXd rxpd;   // E[x' d_hat], I
    double sigma_d2 = 0.0;  // E[d_hat^2]
    std::size_t samples = 0;

    std::size_t taps() const { return static_cast<std::size_t>(rxpd.size()); }
};

/// Time-averaged outer-product estimates over three aligned streams, using
/// newest-first regressor windows of length `taps`. Requires at least
/// 100*taps usable samples.
CorrelationSet estimate_correlations(std::span<const double> x, std::span<const double> xprime,
                                     std::span<const double> d_hat, std::size_t taps);

/// w = (R_x'x' + alpha R_xx)^{-1} r_x'd via a symmetric indefinite solve.
/// A failed factorization is retried once with a diagonal jitter of
/// 1e-10 * trace/I; a still-degenerate system throws SolverError.
Eigen::VectorXd wiener_solve(const CorrelationSet& c, double alpha);

/// Predicted control power w^T R_xx w.
double output_power(const CorrelationSet& c, const Eigen::VectorXd& w);

/// Predicted residual power E[e_m^2] = sigma_d2 - 2 w'r + w'R_x'x' w.
double residual_power(const CorrelationSet& c, const Eigen::VectorXd& w);

struct ConstrainedSolution {
    Eigen::VectorXd w;
    double lambda = 0.0;
    double power = 0.0;     // predicted output power at w
    double residual = 0.0;  // predicted E[e_m^2] at w
};

/// Power-constrained Wiener solution. If the unconstrained filter already
/// satisfies w^T R_xx w <= rho2 the multiplier is zero; otherwise the
/// multiplier is bracketed by doubling and bisected on the monotone power
/// curve until the power matches rho2 to 1e-9 relative (throws SolverError
/// after 200 iterations).
ConstrainedSolution constrained_solve(const CorrelationSet& c, double rho2);

} // namespace anc
