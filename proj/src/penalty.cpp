#include "anc/penalty.hpp"

#include "anc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace anc {

PenaltyEstimator::PenaltyEstimator(const PenaltyConfig& cfg)
    : cfg_(cfg),
      sum_x2_(cfg.window),
      sum_xp2_(cfg.window),
      sum_dhat2_(cfg.window),
      last_gs_(cfg.eps1 / cfg.eps2) {
    if (!(cfg.eps1 > 0.0) || !(cfg.eps2 > 0.0))
        throw ConfigError("penalty: eps1 and eps2 must be positive");
    if (!(cfg.rho2 > 0.0)) throw ConfigError("penalty: rho2 must be positive");
}

double PenaltyEstimator::estimate_gs(double x_n, double xprime_n) {
    const double sx = sum_x2_.push(x_n);
    const double sxp = sum_xp2_.push(xprime_n);
    last_gs_ = std::max(sxp, cfg_.eps1) / std::max(sx, cfg_.eps2);
    return last_gs_;
}

double PenaltyEstimator::variable_penalty(double d_hat_n) {
    const double sd = sum_dhat2_.push(d_hat_n);
    const double gs = last_gs_;
    const double k = static_cast<double>(cfg_.window);
    const double alpha = gs * (std::sqrt(sd / (k * cfg_.rho2 * gs)) - 1.0);
    return alpha > 0.0 ? alpha : 0.0;
}

double offline_penalty(const OfflinePenaltyInput& in) {
    if (!(in.gs > 0.0)) throw ConfigError("offline_penalty: Gs must be positive");
    if (!(in.rho2 > 0.0)) throw ConfigError("offline_penalty: rho2 must be positive");
    if (!(in.sigma_d2 >= 0.0) || !std::isfinite(in.sigma_d2))
        throw ConfigError("offline_penalty: sigma_d2 must be finite and >= 0");
    const double alpha = in.gs * (std::sqrt(in.sigma_d2 / (in.rho2 * in.gs)) - 1.0);
    return alpha > 0.0 ? alpha : 0.0;
}

} // namespace anc
