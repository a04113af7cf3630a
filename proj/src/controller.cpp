#include "anc/controller.hpp"

#include "anc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace anc {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::fxlms: return "FXLMS";
        case Variant::mfxlms: return "MFXLMS";
        case Variant::mov_fxlms: return "MOV_FXLMS";
        case Variant::mov_mfxlms: return "MOV_MFXLMS";
        case Variant::rescaling: return "RESCALING";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "FXLMS") return Variant::fxlms;
    if (name == "MFXLMS") return Variant::mfxlms;
    if (name == "MOV_FXLMS") return Variant::mov_fxlms;
    if (name == "MOV_MFXLMS") return Variant::mov_mfxlms;
    if (name == "RESCALING") return Variant::rescaling;
    throw ConfigError("unknown algorithm variant '" + name +
                      "' (expected FXLMS, MFXLMS, MOV_FXLMS, MOV_MFXLMS or RESCALING)");
}

Controller::Controller(ControllerConfig cfg)
    : cfg_(std::move(cfg)),
      w_(cfg_.taps, 0.0),
      x_line_(std::max(cfg_.taps, cfg_.sec_hat.length())),
      xprime_line_(cfg_.taps),
      y_line_(cfg_.sec_hat.length()) {
    if (cfg_.taps == 0) throw ConfigError("controller: taps must be >= 1");
    if (!(cfg_.mu > 0.0)) throw ConfigError("controller: mu must be positive");
    if (cfg_.sec_hat.length() == 0) throw ConfigError("controller: secondary-path model is empty");
    if (cfg_.variant == Variant::rescaling && !(cfg_.y_max > 0.0))
        throw ConfigError("controller: rescaling needs y_max > 0");
    if (cfg_.variant == Variant::mov_fxlms && !(cfg_.fixed_alpha >= 0.0))
        throw ConfigError("controller: fixed_alpha must be >= 0");
}

double Controller::compute_control(double x_n) {
    if (!std::isfinite(x_n))
        throw CorruptSignalError("controller: non-finite reference sample at step " +
                                 std::to_string(steps_));
    x_line_.push(x_n);
    ++steps_;
    return fir_step(w_, x_line_);
}

double Controller::filtered_reference() {
    const double xp = fir_step(cfg_.sec_hat, x_line_);
    xprime_line_.push(xp);
    return xp;
}

double Controller::estimate_disturbance(double e_n) const {
    return e_n + fir_step(cfg_.sec_hat, y_line_);
}

double Controller::modified_error(double d_hat_n) const {
    return d_hat_n - fir_step(w_, xprime_line_);
}

void Controller::update_weights(double err, double alpha_n, double y_n) {
    const double mu = cfg_.mu;
    bool ok = true;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        const double wi = w_[i] + mu * (xprime_line_[i] * err - alpha_n * x_line_[i] * y_n);
        w_[i] = wi;
        ok &= std::isfinite(wi);
    }
    if (!ok)
        throw DivergenceError("controller: weights diverged (non-finite) at sample " +
                                  std::to_string(steps_ - 1),
                              steps_ - 1);
}

double Controller::rescale_weights(double y_n, double y_max) {
    if (!(y_max > 0.0)) throw ConfigError("rescale_weights: y_max must be positive");
    const double mag = std::abs(y_n);
    if (mag <= y_max) return y_n;
    const double scale = y_max / mag;
    for (double& wi : w_) wi *= scale;
    return y_n < 0.0 ? -y_max : y_max;
}

void Controller::set_weights(const std::vector<double>& w) {
    if (w.size() != w_.size()) throw ConfigError("set_weights: tap count mismatch");
    w_ = w;
}

} // namespace anc
