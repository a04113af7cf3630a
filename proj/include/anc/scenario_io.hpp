#pragma once

#include "anc/sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace anc {

/// One run request: which scenario, where results go, what gets written.
struct RunManifest {
    std::string scenario_path;
    std::string output_dir = ".";
    std::vector<std::string> overrides; // "section.key=value" / "stage.N.key=value"
    bool want_csv = true;
    bool want_json_summary = true;
};

/// Parse a sectioned key=value scenario file. Unknown sections or keys,
/// syntax errors (reported as path:line) and invariant violations (reported
/// with the key path) all throw ConfigError. `overrides` are applied after
/// the file's own assignments and must name existing keys.
Scenario parse_scenario_file(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Canonical text form: every key explicit, stages in order, shortest
/// round-trip numeric formatting. parse(write(sc)) reproduces sc.
void write_scenario(const Scenario& sc, std::ostream& out);
std::string scenario_to_string(const Scenario& sc);

/// Write trace.csv, weights.csv and summary.json under `dir` (created if
/// missing, honoring the manifest's format switches); returns the paths
/// written.
std::vector<std::string> emit_outputs(const MetricsLog& log, const std::string& dir,
                                      bool want_csv = true, bool want_json_summary = true);

/// summary.json body (exposed for tests).
std::string summary_json(const MetricsLog& log);

/// Shortest round-trip decimal formatting used in every emitted file.
std::string format_double(double v);

} // namespace anc
