#pragma once

#include "anc/controller.hpp"
#include "anc/dsp.hpp"
#include "anc/noise.hpp"
#include "anc/oracle.hpp"
#include "anc/penalty.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anc {

struct LoggingConfig {
    std::int64_t decimation = 16;          // trace rows every N samples
    double weight_snapshot_period_s = 0.1; // 0 disables snapshots
};

/// Declarative description of one closed-loop experiment.
struct Scenario {
    std::string name;
    ReferenceTimeline timeline;   // fs, duration, stages, seed
    FirFilter primary;            // reference -> disturbance
    FirFilter secondary;          // control output -> error sensor
    double sec_hat_perturb_rel = 0.0; // per-tap relative Gaussian error on the model
    std::optional<FirFilter> secondary_hat; // explicit model; default: secondary (+perturbation)
    Variant variant = Variant::fxlms;
    std::size_t taps = 0;         // control filter length I
    double mu = 0.0;
    double rho2 = 1.0;
    PenaltyConfig penalty;        // window K, eps floors (rho2 is mirrored in)
    double fixed_alpha = 0.0;     // MOV_FXLMS
    double y_max = 0.0;           // RESCALING
    LoggingConfig logging;

    double fs() const { return timeline.fs_hz; }
    double duration() const { return timeline.duration_s; }
    /// Effective secondary-path model after the perturbation knob.
    FirFilter make_sec_hat() const;
};

void validate_scenario(const Scenario& sc);

/// Moving-average window used for the logged output-power trace.
inline constexpr std::size_t kPowerMaWindow = 1024;
/// A power moving average counts as a constraint violation above this
/// multiple of rho2.
inline constexpr double kViolationFactor = 1.1;

struct MetricsRow {
    std::int64_t n;
    double t, x, d, y, e, alpha, gs_hat, sigma_y2_ma;
};

/// Per-stage aggregates. "Steady" statistics cover the final third of the
/// stage; constraint-violation counting covers the final two thirds (the
/// first third is treated as the convergence transient).
struct StageSummary {
    std::size_t index = 0;
    std::int64_t start_n = 0, end_n = 0; // [start, end)
    double start_s = 0.0, end_s = 0.0;
    double steady_mean_sigma_y2 = 0.0;
    double steady_mean_sigma_e2 = 0.0;
    double steady_mean_alpha = 0.0;
    double alpha_zero_fraction = 0.0;    // over the whole stage
    std::int64_t postconv_samples = 0;
    std::int64_t postconv_ma_violations = 0;
    double max_sigma_y2_ma = 0.0;
    std::vector<double> w_end;           // weights at the stage's last sample
};

struct MetricsLog {
    // run metadata
    std::string scenario_name;
    Variant variant = Variant::fxlms;
    double fs = 0.0, duration_s = 0.0, rho2 = 0.0;
    std::uint64_t seed = 0;
    std::size_t taps = 0;

    std::vector<MetricsRow> rows;
    std::vector<std::pair<std::int64_t, std::vector<double>>> weight_snapshots;
    std::vector<StageSummary> stages;
    std::vector<double> final_w;
    double max_abs_y = 0.0;
    double max_dhat_reconstruction_err = 0.0;

    bool diverged = false;
    std::int64_t divergence_sample = -1;
    std::string divergence_message;
};

/// Run the closed loop sample by sample. Deterministic in the scenario seed.
/// Controller divergence is reported inside the returned log (with the first
/// bad sample index) rather than thrown, so partial traces survive.
MetricsLog run_scenario(const Scenario& sc);

struct RunOutcome {
    std::optional<MetricsLog> log; // empty on scenario error
    std::string error;
};

/// Run scenarios independently with up to `parallelism` worker threads.
/// Result order matches input order and each entry is identical to a solo
/// run_scenario call; per-scenario failures are collected, not thrown.
std::vector<RunOutcome> run_suite(const std::vector<Scenario>& scenarios, unsigned parallelism);

/// Closed-form reference solution for one stage of a scenario.
struct StageOracle {
    std::size_t index = 0;
    double start_s = 0.0, end_s = 0.0;
    CorrelationSet correlations;
    Eigen::VectorXd w_unconstrained;
    double unconstrained_power = 0.0;
    ConstrainedSolution constrained;
    double gs = 0.0;          // E[x'^2] / E[x^2] over the stage
    double sigma_d2 = 0.0;    // E[d_hat^2] over the stage
    double offline_alpha = 0.0;
};

/// Replay each stage span open loop (reference through the primary path and
/// the secondary-path model), estimate correlations, and solve the
/// unconstrained and power-constrained problems. The disturbance estimate is
/// taken as the exact disturbance, which the modified arrangement reproduces
/// under a matched model.
std::vector<StageOracle> analyze_scenario_stages(const Scenario& sc);

/// Stage boundaries in samples: one [start, end) pair per stage.
std::vector<std::pair<std::int64_t, std::int64_t>> stage_bounds(const Scenario& sc);

} // namespace anc
