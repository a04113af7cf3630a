#include "anc/sim.hpp"

#include "anc/errors.hpp"
#include "anc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace anc {

FirFilter Scenario::make_sec_hat() const {
    FirFilter hat = secondary_hat.value_or(secondary);
    if (sec_hat_perturb_rel != 0.0) {
        GaussianRng rng(mix_seed(timeline.seed, 0x5ec0da7ULL));
        for (double& tap : hat.coeffs) tap *= 1.0 + sec_hat_perturb_rel * rng.next();
    }
    return hat;
}

void validate_scenario(const Scenario& sc) {
    validate_timeline(sc.timeline);
    if (sc.taps < 1) throw ConfigError("algorithm.taps: must be >= 1");
    if (!(sc.mu > 0.0)) throw ConfigError("algorithm.mu: must be positive");
    if (!(sc.rho2 > 0.0)) throw ConfigError("constraint.rho2: must be positive");
    if (sc.logging.decimation < 1) throw ConfigError("logging.decimation: must be >= 1");
    if (sc.logging.weight_snapshot_period_s < 0.0)
        throw ConfigError("logging.weight_snapshot_period_s: must be >= 0");
    if (sc.primary.length() == 0) throw ConfigError("paths.primary: missing");
    if (sc.secondary.length() == 0) throw ConfigError("paths.secondary: missing");
    if (sc.secondary_hat && sc.secondary_hat->length() == 0)
        throw ConfigError("paths.secondary_hat: empty");
    if (sc.penalty.window < 1) throw ConfigError("penalty.window: must be >= 1");
    if (!(sc.penalty.eps1 > 0.0)) throw ConfigError("penalty.eps1: must be positive");
    if (!(sc.penalty.eps2 > 0.0)) throw ConfigError("penalty.eps2: must be positive");
    if (sc.variant == Variant::mov_fxlms && !(sc.fixed_alpha >= 0.0))
        throw ConfigError("penalty.fixed_alpha: must be >= 0 for MOV_FXLMS");
    if (sc.variant == Variant::rescaling && !(sc.y_max > 0.0))
        throw ConfigError("penalty.y_max: must be positive for RESCALING");
    if (!(sc.sec_hat_perturb_rel >= 0.0))
        throw ConfigError("paths.sec_hat_perturb_rel: must be >= 0");
}

std::vector<std::pair<std::int64_t, std::int64_t>> stage_bounds(const Scenario& sc) {
    const auto total = static_cast<std::int64_t>(std::llround(sc.fs() * sc.duration()));
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
    const auto& stages = sc.timeline.stages;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto start = static_cast<std::int64_t>(std::llround(stages[i].start_s * sc.fs()));
        const auto end = i + 1 < stages.size()
                             ? static_cast<std::int64_t>(std::llround(stages[i + 1].start_s * sc.fs()))
                             : total;
        bounds.emplace_back(start, end);
    }
    return bounds;
}

MetricsLog run_scenario(const Scenario& sc) {
    validate_scenario(sc);

    const std::vector<double> x_seq = compose_timeline(sc.timeline);
    const auto total = static_cast<std::int64_t>(x_seq.size());

    ControllerConfig ctrl_cfg;
    ctrl_cfg.taps = sc.taps;
    ctrl_cfg.mu = sc.mu;
    ctrl_cfg.variant = sc.variant;
    ctrl_cfg.sec_hat = sc.make_sec_hat();
    ctrl_cfg.fixed_alpha = sc.fixed_alpha;
    ctrl_cfg.y_max = sc.y_max;
    Controller ctrl(ctrl_cfg);

    PenaltyConfig pen_cfg = sc.penalty;
    pen_cfg.rho2 = sc.rho2;
    PenaltyEstimator penalty(pen_cfg);

    DelayLine primary_line(sc.primary.length());
    DelayLine plant_line(sc.secondary.length());
    WindowedPower ma(kPowerMaWindow);

    MetricsLog log;
    log.scenario_name = sc.name;
    log.variant = sc.variant;
    log.fs = sc.fs();
    log.duration_s = sc.duration();
    log.rho2 = sc.rho2;
    log.seed = sc.timeline.seed;
    log.taps = sc.taps;
    log.rows.reserve(static_cast<std::size_t>(total / sc.logging.decimation + 1));

    const auto bounds = stage_bounds(sc);
    struct StageAccum {
        double steady_y2 = 0.0, steady_e2 = 0.0, steady_alpha = 0.0;
        std::int64_t steady_n = 0;
        std::int64_t alpha_zero = 0, samples = 0;
        std::int64_t postconv_n = 0, violations = 0;
        double max_ma = 0.0;
    };
    std::vector<StageAccum> acc(bounds.size());
    log.stages.resize(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        auto& st = log.stages[i];
        st.index = i;
        st.start_n = bounds[i].first;
        st.end_n = bounds[i].second;
        st.start_s = static_cast<double>(st.start_n) / sc.fs();
        st.end_s = static_cast<double>(st.end_n) / sc.fs();
    }

    const std::int64_t snap_period =
        sc.logging.weight_snapshot_period_s > 0.0
            ? std::max<std::int64_t>(1, std::llround(sc.logging.weight_snapshot_period_s * sc.fs()))
            : 0;
    const double violation_level = kViolationFactor * sc.rho2;

    std::size_t stage_idx = 0;
    for (std::int64_t n = 0; n < total; ++n) {
        while (stage_idx + 1 < bounds.size() && n >= bounds[stage_idx + 1].first) ++stage_idx;
        const double x = x_seq[static_cast<std::size_t>(n)];

        primary_line.push(x);
        const double d = fir_step(sc.primary, primary_line);

        double y = 0.0, e = 0.0, alpha_used = 0.0, gs = 0.0, dhat = 0.0;
        try {
            const double y_raw = ctrl.compute_control(x);
            y = y_raw;
            if (sc.variant == Variant::rescaling && std::abs(y_raw) > sc.y_max)
                y = y_raw < 0.0 ? -sc.y_max : sc.y_max;
            ctrl.push_output(y);

            plant_line.push(y);
            const double y_prime = fir_step(sc.secondary, plant_line);
            e = d - y_prime;

            const double xp = ctrl.filtered_reference();
            dhat = ctrl.estimate_disturbance(e);
            const double e_m = ctrl.modified_error(dhat);

            gs = penalty.estimate_gs(x, xp);
            const double alpha_var = penalty.variable_penalty(dhat);
            switch (sc.variant) {
                case Variant::mov_fxlms: alpha_used = sc.fixed_alpha; break;
                case Variant::mov_mfxlms: alpha_used = alpha_var; break;
                default: alpha_used = 0.0; break;
            }
            const double err = uses_modified_error(sc.variant) ? e_m : e;
            ctrl.update_weights(err, alpha_used, y_raw);
            if (sc.variant == Variant::rescaling) ctrl.rescale_weights(y_raw, sc.y_max);
        } catch (const DivergenceError& ex) {
            log.diverged = true;
            log.divergence_sample = ex.sample();
            log.divergence_message = ex.what();
            break;
        }

        ma.push(y);
        const double sigma_ma = ma.mean();

        const double rec_err = std::abs(dhat - d);
        if (rec_err > log.max_dhat_reconstruction_err) log.max_dhat_reconstruction_err = rec_err;
        if (std::abs(y) > log.max_abs_y) log.max_abs_y = std::abs(y);

        auto& a = acc[stage_idx];
        const auto [s_begin, s_end] = bounds[stage_idx];
        const std::int64_t len = s_end - s_begin;
        ++a.samples;
        if (alpha_used == 0.0) ++a.alpha_zero;
        if (n >= s_begin + len / 3) {
            ++a.postconv_n;
            if (sigma_ma > violation_level) ++a.violations;
        }
        if (n >= s_begin + 2 * len / 3) {
            a.steady_y2 += y * y;
            a.steady_e2 += e * e;
            a.steady_alpha += alpha_used;
            ++a.steady_n;
        }
        if (sigma_ma > a.max_ma) a.max_ma = sigma_ma;

        if (n % sc.logging.decimation == 0) {
            log.rows.push_back({n, static_cast<double>(n) / sc.fs(), x, d, y, e, alpha_used, gs,
                                sigma_ma});
        }
        if (snap_period > 0 && n % snap_period == 0)
            log.weight_snapshots.emplace_back(n, ctrl.weights());
        if (n + 1 == s_end) log.stages[stage_idx].w_end = ctrl.weights();
    }

    for (std::size_t i = 0; i < bounds.size(); ++i) {
        auto& st = log.stages[i];
        const auto& a = acc[i];
        if (a.steady_n > 0) {
            st.steady_mean_sigma_y2 = a.steady_y2 / static_cast<double>(a.steady_n);
            st.steady_mean_sigma_e2 = a.steady_e2 / static_cast<double>(a.steady_n);
            st.steady_mean_alpha = a.steady_alpha / static_cast<double>(a.steady_n);
        }
        st.alpha_zero_fraction =
            a.samples > 0 ? static_cast<double>(a.alpha_zero) / static_cast<double>(a.samples) : 0.0;
        st.postconv_samples = a.postconv_n;
        st.postconv_ma_violations = a.violations;
        st.max_sigma_y2_ma = a.max_ma;
    }
    log.final_w = ctrl.weights();
    return log;
}

std::vector<RunOutcome> run_suite(const std::vector<Scenario>& scenarios, unsigned parallelism) {
    if (parallelism < 1) throw ConfigError("run_suite: parallelism must be >= 1");
    std::vector<RunOutcome> out(scenarios.size());
    if (scenarios.empty()) return out;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            try {
                out[i].log = run_scenario(scenarios[i]);
            } catch (const std::exception& ex) {
                out[i].error = ex.what();
            }
        }
    };
    const unsigned n_workers =
        std::min<unsigned>(parallelism, static_cast<unsigned>(scenarios.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<StageOracle> analyze_scenario_stages(const Scenario& sc) {
    validate_scenario(sc);
    const std::vector<double> x_seq = compose_timeline(sc.timeline);
    const FirFilter sec_hat = sc.make_sec_hat();

    // Open-loop replay: d through the primary path, x' through the model.
    std::vector<double> d(x_seq.size()), xp(x_seq.size());
    DelayLine line(std::max(sc.primary.length(), sec_hat.length()));
    for (std::size_t n = 0; n < x_seq.size(); ++n) {
        line.push(x_seq[n]);
        d[n] = fir_step(sc.primary, line);
        xp[n] = fir_step(sec_hat, line);
    }

    // Correlation estimation is O(N * taps^2); for large filters a capped
    // sample count keeps the report interactive without starving the
    // estimate (still >= 100 * taps).
    const std::size_t n_cap =
        sc.taps <= 16 ? std::numeric_limits<std::size_t>::max()
                      : std::max<std::size_t>(100 * sc.taps, std::size_t{1} << 17);

    std::vector<StageOracle> result;
    for (const auto& [begin, end] : stage_bounds(sc)) {
        const auto span = static_cast<std::size_t>(end - begin);
        const auto len = std::min(span, n_cap);
        // Center the capped block so slowly varying stages are sampled at
        // their representative middle rather than their leading edge.
        const auto b = static_cast<std::size_t>(begin) + (span - len) / 2;
        StageOracle so;
        so.index = result.size();
        so.start_s = static_cast<double>(begin) / sc.fs();
        so.end_s = static_cast<double>(end) / sc.fs();
        so.correlations = estimate_correlations(
            std::span(x_seq).subspan(b, len), std::span(xp).subspan(b, len),
            std::span(d).subspan(b, len), sc.taps);
        so.w_unconstrained = wiener_solve(so.correlations, 0.0);
        so.unconstrained_power = output_power(so.correlations, so.w_unconstrained);
        so.constrained = constrained_solve(so.correlations, sc.rho2);
        double sx2 = 0.0, sxp2 = 0.0;
        for (std::size_t k = b; k < b + len; ++k) {
            sx2 += x_seq[k] * x_seq[k];
            sxp2 += xp[k] * xp[k];
        }
        so.gs = sxp2 / sx2;
        so.sigma_d2 = so.correlations.sigma_d2;
        so.offline_alpha = offline_penalty({so.sigma_d2, so.gs, sc.rho2});
        result.push_back(std::move(so));
    }
    return result;
}

} // namespace anc
