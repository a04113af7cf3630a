#pragma once

#include "anc/dsp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace anc {

enum class Variant { fxlms, mfxlms, mov_fxlms, mov_mfxlms, rescaling };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// True for the variants whose weight update is driven by the re-synthesized
/// error e_m rather than the raw error-sensor signal.
inline bool uses_modified_error(Variant v) {
    return v == Variant::mfxlms || v == Variant::mov_fxlms || v == Variant::mov_mfxlms;
}

struct ControllerConfig {
    std::size_t taps = 0;          // I
    double mu = 0.0;               // step size
    Variant variant = Variant::fxlms;
    FirFilter sec_hat;             // secondary-path model, L taps
    double fixed_alpha = 0.0;      // mov_fxlms only
    double y_max = 0.0;            // rescaling only
};

/// Per-sample adaptive control filter. One instance per stream; all state is
/// owned here and mutated strictly in sample order.
///
/// Call order within a sample: compute_control, push_output, then
/// filtered_reference / estimate_disturbance / modified_error as needed, then
/// update_weights (and rescale_weights for the rescaling variant).
class Controller {
public:
    explicit Controller(ControllerConfig cfg);

    /// Pushes x(n) into the reference history and returns y(n) = w^T x(n).
    double compute_control(double x_n);

    /// Record the control sample actually emitted to the plant this step.
    /// For the rescaling variant this may differ from compute_control's value.
    void push_output(double y_n) { y_line_.push(y_n); }

    /// x'(n) from the secondary-path model over the current reference
    /// history; pushed into the filtered-reference delay line.
    double filtered_reference();

    /// d_hat(n) = e(n) + sum_l s_hat_l * y(n-l); the y history holds the
    /// emitted outputs, i.e. the historical w^T(n-l) x(n-l) products.
    double estimate_disturbance(double e_n) const;

    /// e_m(n) = d_hat(n) - w^T(n) x'(n).
    double modified_error(double d_hat_n) const;

    /// w(n+1) = w(n) + mu * [x'(n) err - alpha x(n) y]. The caller supplies
    /// err = e(n) or e_m(n) per variant, and alpha per variant (0 where the
    /// penalty is off). Throws DivergenceError if any weight leaves the
    /// finite domain.
    void update_weights(double err, double alpha_n, double y_n);

    /// If |y| exceeds y_max, shrink every weight by y_max/|y| and return the
    /// re-scaled output sign(y)*y_max; otherwise return y unchanged.
    double rescale_weights(double y_n, double y_max);

    const std::vector<double>& weights() const noexcept { return w_; }
    void set_weights(const std::vector<double>& w);
    std::size_t taps() const noexcept { return w_.size(); }
    Variant variant() const noexcept { return cfg_.variant; }
    const ControllerConfig& config() const noexcept { return cfg_; }
    std::int64_t steps() const noexcept { return steps_; }

private:
    ControllerConfig cfg_;
    std::vector<double> w_;
    DelayLine x_line_;
    DelayLine xprime_line_;
    DelayLine y_line_;
    std::int64_t steps_ = 0;
};

} // namespace anc
