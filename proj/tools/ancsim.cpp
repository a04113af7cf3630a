// Command-line front end: run scenarios, batch suites, print the closed-form
// per-stage solutions, or just validate a scenario file.

#include "anc/errors.hpp"
#include "anc/scenario_io.hpp"
#include "anc/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 1;
constexpr int kExitDivergence = 2;

std::string default_output_dir() {
    const char* env = std::getenv("ANCSIM_OUTDIR");
    return env && *env ? env : ".";
}

void print_stage_report(const anc::StageOracle& so) {
    auto vec = [](const Eigen::VectorXd& w) {
        std::string s = "[";
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (i) s += ", ";
            s += anc::format_double(w[i]);
        }
        return s + "]";
    };
    std::cout << "stage " << so.index << " [" << so.start_s << " s, " << so.end_s << " s)\n";
    std::cout << "  unconstrained w      = " << vec(so.w_unconstrained) << "\n";
    std::cout << "  unconstrained power  = " << anc::format_double(so.unconstrained_power) << "\n";
    std::cout << "  constrained w_o      = " << vec(so.constrained.w) << "\n";
    std::cout << "  lambda_o             = " << anc::format_double(so.constrained.lambda) << "\n";
    std::cout << "  constrained power    = " << anc::format_double(so.constrained.power) << "\n";
    std::cout << "  constrained residual = " << anc::format_double(so.constrained.residual) << "\n";
    std::cout << "  Gs (x'/x power)      = " << anc::format_double(so.gs) << "\n";
    std::cout << "  sigma_d2             = " << anc::format_double(so.sigma_d2) << "\n";
    std::cout << "  offline alpha        = " << anc::format_double(so.offline_alpha) << "\n";
}

int cmd_run(const anc::RunManifest& manifest) {
    const anc::Scenario sc = anc::parse_scenario_file(manifest.scenario_path, manifest.overrides);
    const anc::MetricsLog log = anc::run_scenario(sc);
    const auto files = anc::emit_outputs(log, manifest.output_dir, manifest.want_csv,
                                         manifest.want_json_summary);
    for (const auto& f : files) std::cout << f << "\n";
    if (log.diverged) {
        std::cerr << "divergence: " << log.divergence_message << "\n";
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_suite(const std::string& dir, unsigned jobs, const std::string& outdir) {
    std::vector<anc::Scenario> scenarios;
    std::vector<std::string> names;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".scenario")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) {
        std::cerr << "no .scenario files in " << dir << "\n";
        return kExitScenarioError;
    }
    int rc = kExitOk;
    for (const auto& p : paths) {
        try {
            scenarios.push_back(anc::parse_scenario_file(p.string()));
            names.push_back(p.stem().string());
        } catch (const std::exception& ex) {
            std::cerr << p.string() << ": " << ex.what() << "\n";
            rc = kExitScenarioError;
        }
    }
    const auto outcomes = anc::run_suite(scenarios, jobs);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& oc = outcomes[i];
        if (!oc.log) {
            std::cerr << names[i] << ": " << oc.error << "\n";
            rc = std::max(rc, kExitScenarioError);
            continue;
        }
        const auto sub = (std::filesystem::path(outdir) / names[i]).string();
        anc::emit_outputs(*oc.log, sub);
        if (oc.log->diverged) {
            std::cerr << names[i] << ": diverged at sample " << oc.log->divergence_sample << "\n";
            rc = std::max(rc, kExitDivergence);
        } else {
            std::cout << names[i] << ": ok -> " << sub << "\n";
        }
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Output-power-constrained active noise control simulator"};
    app.require_subcommand(1);

    anc::RunManifest manifest;
    manifest.output_dir = default_output_dir();
    std::vector<std::string> formats;

    auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
    run->add_option("scenario", manifest.scenario_path, "Scenario file")->required();
    run->add_option("-o,--output", manifest.output_dir, "Output directory");
    run->add_option("--set", manifest.overrides,
                    "Override a scenario key, e.g. --set algorithm.variant=FXLMS");
    run->add_option("--format", formats, "Outputs to write: csv, json-summary (default both)")
        ->delimiter(',');

    std::string suite_dir, suite_out = default_output_dir();
    unsigned jobs = 1;
    auto* suite = app.add_subcommand("suite", "Run every .scenario file in a directory");
    suite->add_option("dir", suite_dir, "Directory of scenario files")->required();
    suite->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    suite->add_option("-o,--output", suite_out, "Output directory");

    std::string oracle_path;
    auto* oracle = app.add_subcommand(
        "oracle", "Print the closed-form per-stage solutions for a scenario");
    oracle->add_option("scenario", oracle_path, "Scenario file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!formats.empty()) {
                manifest.want_csv = false;
                manifest.want_json_summary = false;
                for (const auto& f : formats) {
                    if (f == "csv") manifest.want_csv = true;
                    else if (f == "json-summary") manifest.want_json_summary = true;
                    else throw anc::ConfigError("unknown format '" + f + "'");
                }
            }
            return cmd_run(manifest);
        }
        if (suite->parsed()) return cmd_suite(suite_dir, jobs, suite_out);
        if (oracle->parsed()) {
            const anc::Scenario sc = anc::parse_scenario_file(oracle_path);
            for (const auto& so : anc::analyze_scenario_stages(sc)) print_stage_report(so);
            return kExitOk;
        }
        if (validate->parsed()) {
            anc::parse_scenario_file(validate_path);
            std::cout << "ok\n";
            return kExitOk;
        }
    } catch (const anc::DivergenceError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitScenarioError;
    }
    return kExitOk;
}
