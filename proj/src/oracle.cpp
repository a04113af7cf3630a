#include "anc/oracle.hpp"

#include "anc/errors.hpp"

#include <cmath>
#include <string>

namespace anc {

namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    auto acceptable = [](const Eigen::LDLT<Eigen::MatrixXd>& f) {
        if (f.info() != Eigen::Success) return false;
        const auto& d = f.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        const double dmin = d.cwiseAbs().minCoeff();
        return d.minCoeff() > 0.0 && dmin > dmax * 1e-12;
    };
    if (acceptable(ldlt)) return ldlt.solve(b);

    // Degenerate (e.g. narrowband reference): retry with a small ridge.
    const double jitter = 1e-10 * a.trace() / static_cast<double>(a.rows());
    Eigen::MatrixXd aj = a;
    aj.diagonal().array() += jitter;
    ldlt.compute(aj);
    if (!acceptable(ldlt))
        throw SolverError("wiener_solve: correlation system is singular or ill-conditioned");
    return ldlt.solve(b);
}

} // namespace

CorrelationSet estimate_correlations(std::span<const double> x, std::span<const double> xprime,
                                     std::span<const double> d_hat, std::size_t taps) {
    const std::size_t n = x.size();
    if (xprime.size() != n || d_hat.size() != n)
        throw ConfigError("estimate_correlations: stream lengths differ");
    if (taps == 0) throw ConfigError("estimate_correlations: taps must be >= 1");
    if (n < taps || n - (taps - 1) < 100 * taps)
        throw ConfigError("estimate_correlations: need at least 100*taps usable samples, have " +
                          std::to_string(n));

    const auto ti = static_cast<Eigen::Index>(taps);
    Eigen::MatrixXd rxx = Eigen::MatrixXd::Zero(ti, ti);
    Eigen::MatrixXd rxpxp = Eigen::MatrixXd::Zero(ti, ti);
    Eigen::VectorXd rxpd = Eigen::VectorXd::Zero(ti);
    double sd2 = 0.0;

    Eigen::VectorXd vx(ti), vxp(ti);
    const std::size_t count = n - (taps - 1);
    for (std::size_t m = taps - 1; m < n; ++m) {
        for (std::size_t k = 0; k < taps; ++k) {
            vx[static_cast<Eigen::Index>(k)] = x[m - k];
            vxp[static_cast<Eigen::Index>(k)] = xprime[m - k];
        }
        rxx.selfadjointView<Eigen::Lower>().rankUpdate(vx);
        rxpxp.selfadjointView<Eigen::Lower>().rankUpdate(vxp);
        rxpd.noalias() += vxp * d_hat[m];
        sd2 += d_hat[m] * d_hat[m];
    }
    const double inv = 1.0 / static_cast<double>(count);
    rxx = rxx.selfadjointView<Eigen::Lower>();
    rxpxp = rxpxp.selfadjointView<Eigen::Lower>();
    rxx *= inv;
    rxpxp *= inv;
    rxpd *= inv;

    CorrelationSet c;
    c.rxx = 0.5 * (rxx + rxx.transpose());
    c.rxpxp = 0.5 * (rxpxp + rxpxp.transpose());
    c.rxpd = rxpd;
    c.sigma_d2 = sd2 * inv;
    c.samples = count;
    return c;
}

Eigen::VectorXd wiener_solve(const CorrelationSet& c, double alpha) {
    if (!(alpha >= 0.0)) throw ConfigError("wiener_solve: alpha must be >= 0");
    if (c.rxx.rows() != c.rxpxp.rows() || c.rxx.rows() != c.rxpd.size())
        throw ConfigError("wiener_solve: correlation dimensions disagree");
    return solve_spd(c.rxpxp + alpha * c.rxx, c.rxpd);
}

double output_power(const CorrelationSet& c, const Eigen::VectorXd& w) {
    if (w.size() != c.rxx.rows()) throw ConfigError("output_power: dimension mismatch");
    return w.dot(c.rxx * w);
}

double residual_power(const CorrelationSet& c, const Eigen::VectorXd& w) {
    return c.sigma_d2 - 2.0 * w.dot(c.rxpd) + w.dot(c.rxpxp * w);
}

ConstrainedSolution constrained_solve(const CorrelationSet& c, double rho2) {
    if (!(rho2 > 0.0)) throw ConfigError("constrained_solve: rho2 must be positive");

    ConstrainedSolution sol;
    sol.w = wiener_solve(c, 0.0);
    sol.power = output_power(c, sol.w);
    if (sol.power <= rho2) {
        sol.lambda = 0.0;
        sol.residual = residual_power(c, sol.w);
        return sol;
    }

    double hi = 1.0;
    int iters = 0;
    while (output_power(c, wiener_solve(c, hi)) > rho2) {
        hi *= 2.0;
        if (++iters > 200)
            throw SolverError("constrained_solve: could not bracket the multiplier "
                              "(degenerate correlations)");
    }
    double lo = 0.0;
    const double tol = 1e-9 * rho2;
    Eigen::VectorXd w;
    double power = 0.0, lambda = hi;
    for (iters = 0; iters < 200; ++iters) {
        lambda = 0.5 * (lo + hi);
        w = wiener_solve(c, lambda);
        power = output_power(c, w);
        if (std::abs(power - rho2) <= tol) break;
        (power > rho2 ? lo : hi) = lambda;
    }
    if (std::abs(power - rho2) > 1e-6 * rho2)
        throw SolverError("constrained_solve: bisection failed to meet the power target "
                          "after 200 iterations");
    sol.w = w;
    sol.lambda = lambda;
    sol.power = power;
    sol.residual = residual_power(c, w);
    return sol;
}

} // namespace anc
