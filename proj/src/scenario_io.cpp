#include "anc/scenario_io.hpp"

#include "anc/errors.hpp"
#include "anc/wav.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace anc {

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    double out = 0.0;
    const std::string t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(key + ": not a number: '" + v + "'");
    return out;
}

std::int64_t parse_integer(const std::string& v, const std::string& key) {
    const double d = parse_number(v, key);
    const auto i = static_cast<std::int64_t>(std::llround(d));
    if (static_cast<double>(i) != d) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return i;
}

std::uint64_t parse_seed(const std::string& v, const std::string& key) {
    std::uint64_t out = 0;
    const std::string t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return out;
}

std::vector<double> parse_tap_list(const std::string& v, const std::string& key) {
    std::vector<double> taps;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) taps.push_back(parse_number(item, key));
    if (taps.empty()) throw ConfigError(key + ": empty tap list");
    return taps;
}

/// Mutable parse state: optionals track which required keys appeared.
struct Builder {
    fs::path base_dir;
    std::string default_name;

    std::optional<std::string> name;
    std::optional<double> fs_hz, duration_s;
    std::optional<std::uint64_t> seed;

    std::optional<std::vector<double>> primary, secondary, secondary_hat;
    double sec_hat_perturb_rel = 0.0;

    std::optional<std::string> variant;
    std::optional<std::int64_t> taps;
    std::optional<double> mu;

    double rho2 = 1.0;
    std::int64_t window = 1024;
    double eps1 = 1e-12, eps2 = 1e-12;
    double fixed_alpha = 0.0, y_max = 0.0;

    std::int64_t decimation = 16;
    double weight_snapshot_period_s = 0.1;

    struct StageDraft {
        double start_s = 0.0;
        std::string mode = "replace";
        std::optional<std::string> source;
        double lo_hz = 0.0, hi_hz = 0.0, variance = 0.0;
        std::string file;
        double gain = 1.0;
    };
    std::vector<StageDraft> stages;

    std::vector<double> load_taps_file(const std::string& rel, const std::string& key) const {
        const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base_dir / rel;
        Recording rec = load_recording(p.string());
        if (rec.samples.empty()) throw ConfigError(key + ": no taps in " + p.string());
        return rec.samples;
    }

    void set(const std::string& path, const std::string& value) {
        const auto dot = path.find('.');
        if (dot == std::string::npos) throw ConfigError("unknown key '" + path + "'");
        const std::string section = path.substr(0, dot);
        const std::string key = path.substr(dot + 1);

        if (section == "scenario") {
            if (key == "name") name = trim(value);
            else if (key == "fs_hz") fs_hz = parse_number(value, path);
            else if (key == "duration_s") duration_s = parse_number(value, path);
            else if (key == "seed") seed = parse_seed(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "paths") {
            if (key == "primary_taps") primary = parse_tap_list(value, path);
            else if (key == "primary_file") primary = load_taps_file(trim(value), path);
            else if (key == "secondary_taps") secondary = parse_tap_list(value, path);
            else if (key == "secondary_file") secondary = load_taps_file(trim(value), path);
            else if (key == "secondary_hat_taps") secondary_hat = parse_tap_list(value, path);
            else if (key == "secondary_hat_file") secondary_hat = load_taps_file(trim(value), path);
            else if (key == "sec_hat_perturb_rel") sec_hat_perturb_rel = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "algorithm") {
            if (key == "variant") variant = trim(value);
            else if (key == "taps") taps = parse_integer(value, path);
            else if (key == "mu") mu = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "constraint") {
            if (key == "rho2") rho2 = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "penalty") {
            if (key == "window") window = parse_integer(value, path);
            else if (key == "eps1") eps1 = parse_number(value, path);
            else if (key == "eps2") eps2 = parse_number(value, path);
            else if (key == "fixed_alpha") fixed_alpha = parse_number(value, path);
            else if (key == "y_max") y_max = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "logging") {
            if (key == "decimation") decimation = parse_integer(value, path);
            else if (key == "weight_snapshot_period_s")
                weight_snapshot_period_s = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else if (section == "stage") {
            // "stage.<key>" targets the stage being parsed (the last one);
            // "stage.<idx>.<key>" addresses one explicitly (overrides).
            std::string field = key;
            std::size_t idx = stages.empty() ? 0 : stages.size() - 1;
            const auto dot2 = key.find('.');
            if (dot2 != std::string::npos) {
                const std::string idx_str = key.substr(0, dot2);
                field = key.substr(dot2 + 1);
                std::size_t pos = 0;
                idx = std::stoul(idx_str, &pos);
                if (pos != idx_str.size()) throw ConfigError("unknown key '" + path + "'");
            }
            if (idx >= stages.size())
                throw ConfigError(path + ": stage " + std::to_string(idx) + " does not exist");
            auto& st = stages[idx];
            if (field == "start_s") st.start_s = parse_number(value, path);
            else if (field == "mode") st.mode = trim(value);
            else if (field == "source") st.source = trim(value);
            else if (field == "lo_hz") st.lo_hz = parse_number(value, path);
            else if (field == "hi_hz") st.hi_hz = parse_number(value, path);
            else if (field == "variance") st.variance = parse_number(value, path);
            else if (field == "file") st.file = trim(value);
            else if (field == "gain") st.gain = parse_number(value, path);
            else throw ConfigError("unknown key '" + path + "'");
        } else {
            throw ConfigError("unknown key '" + path + "'");
        }
    }

    Scenario assemble() const {
        auto require = [](bool ok, const char* key) {
            if (!ok) throw ConfigError(std::string(key) + ": required key is missing");
        };
        require(fs_hz.has_value(), "scenario.fs_hz");
        require(duration_s.has_value(), "scenario.duration_s");
        require(primary.has_value(), "paths.primary_taps");
        require(secondary.has_value(), "paths.secondary_taps");
        require(variant.has_value(), "algorithm.variant");
        require(taps.has_value(), "algorithm.taps");
        require(mu.has_value(), "algorithm.mu");
        if (stages.empty()) throw ConfigError("stage: at least one [stage] section is required");

        Scenario sc;
        sc.name = name.value_or(default_name);
        sc.timeline.fs_hz = *fs_hz;
        sc.timeline.duration_s = *duration_s;
        sc.timeline.seed = seed.value_or(1);
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const auto& d = stages[i];
            const std::string key = "stage." + std::to_string(i) + ".";
            NoiseStage st;
            st.start_s = d.start_s;
            if (d.mode == "replace") st.mode = StageMode::replace;
            else if (d.mode == "compound") st.mode = StageMode::compound;
            else throw ConfigError(key + "mode: expected 'replace' or 'compound', got '" + d.mode + "'");
            if (!d.source) throw ConfigError(key + "source: required key is missing");
            if (*d.source == "bandlimited") {
                st.source = BandlimitedSource{d.lo_hz, d.hi_hz, d.variance};
            } else if (*d.source == "recording") {
                if (d.file.empty()) throw ConfigError(key + "file: required for recording stages");
                const fs::path p =
                    fs::path(d.file).is_absolute() ? fs::path(d.file) : base_dir / d.file;
                st.source = RecordingSource{p.string(), d.gain};
            } else {
                throw ConfigError(key + "source: expected 'bandlimited' or 'recording', got '" +
                                  *d.source + "'");
            }
            sc.timeline.stages.push_back(std::move(st));
        }

        sc.primary = FirFilter(*primary);
        sc.secondary = FirFilter(*secondary);
        if (secondary_hat) sc.secondary_hat = FirFilter(*secondary_hat);
        sc.sec_hat_perturb_rel = sec_hat_perturb_rel;
        sc.variant = variant_from_name(*variant);
        if (*taps < 1) throw ConfigError("algorithm.taps: must be >= 1");
        sc.taps = static_cast<std::size_t>(*taps);
        sc.mu = *mu;
        sc.rho2 = rho2;
        if (window < 1) throw ConfigError("penalty.window: must be >= 1");
        sc.penalty.window = static_cast<std::size_t>(window);
        sc.penalty.eps1 = eps1;
        sc.penalty.eps2 = eps2;
        sc.penalty.rho2 = rho2;
        sc.fixed_alpha = fixed_alpha;
        sc.y_max = y_max;
        sc.logging.decimation = decimation;
        sc.logging.weight_snapshot_period_s = weight_snapshot_period_s;

        validate_scenario(sc);
        return sc;
    }
};

} // namespace

Scenario parse_scenario_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario: " + path);

    Builder b;
    b.base_dir = fs::path(path).parent_path();
    b.default_name = fs::path(path).stem().string();

    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            if (section == "stage") b.stages.emplace_back();
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (section.empty()) throw ConfigError(where + ": key outside any [section]");
        try {
            b.set(section + "." + key, value);
        } catch (const ConfigError& ex) {
            throw ConfigError(where + ": " + ex.what());
        }
    }

    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        b.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    return b.assemble();
}

namespace {

void write_taps(std::ostream& out, const char* key, const std::vector<double>& taps) {
    out << key << " = ";
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (i) out << ", ";
        out << format_double(taps[i]);
    }
    out << '\n';
}

} // namespace

void write_scenario(const Scenario& sc, std::ostream& out) {
    out << "[scenario]\n";
    out << "name = " << sc.name << '\n';
    out << "fs_hz = " << format_double(sc.timeline.fs_hz) << '\n';
    out << "duration_s = " << format_double(sc.timeline.duration_s) << '\n';
    out << "seed = " << sc.timeline.seed << "\n\n";

    out << "[paths]\n";
    write_taps(out, "primary_taps", sc.primary.coeffs);
    write_taps(out, "secondary_taps", sc.secondary.coeffs);
    if (sc.secondary_hat) write_taps(out, "secondary_hat_taps", sc.secondary_hat->coeffs);
    out << "sec_hat_perturb_rel = " << format_double(sc.sec_hat_perturb_rel) << "\n\n";

    out << "[algorithm]\n";
    out << "variant = " << variant_name(sc.variant) << '\n';
    out << "taps = " << sc.taps << '\n';
    out << "mu = " << format_double(sc.mu) << "\n\n";

    out << "[constraint]\n";
    out << "rho2 = " << format_double(sc.rho2) << "\n\n";

    out << "[penalty]\n";
    out << "window = " << sc.penalty.window << '\n';
    out << "eps1 = " << format_double(sc.penalty.eps1) << '\n';
    out << "eps2 = " << format_double(sc.penalty.eps2) << '\n';
    out << "fixed_alpha = " << format_double(sc.fixed_alpha) << '\n';
    out << "y_max = " << format_double(sc.y_max) << "\n\n";

    out << "[logging]\n";
    out << "decimation = " << sc.logging.decimation << '\n';
    out << "weight_snapshot_period_s = " << format_double(sc.logging.weight_snapshot_period_s)
        << '\n';

    for (const auto& st : sc.timeline.stages) {
        out << "\n[stage]\n";
        out << "start_s = " << format_double(st.start_s) << '\n';
        out << "mode = " << (st.mode == StageMode::replace ? "replace" : "compound") << '\n';
        if (const auto* bnd = std::get_if<BandlimitedSource>(&st.source)) {
            out << "source = bandlimited\n";
            out << "lo_hz = " << format_double(bnd->lo_hz) << '\n';
            out << "hi_hz = " << format_double(bnd->hi_hz) << '\n';
            out << "variance = " << format_double(bnd->variance) << '\n';
        } else {
            const auto& rec = std::get<RecordingSource>(st.source);
            out << "source = recording\n";
            out << "file = " << rec.path << '\n';
            out << "gain = " << format_double(rec.gain) << '\n';
        }
    }
}

std::string scenario_to_string(const Scenario& sc) {
    std::ostringstream ss;
    write_scenario(sc, ss);
    return ss.str();
}

std::string summary_json(const MetricsLog& log) {
    nlohmann::json j;
    j["scenario"] = log.scenario_name;
    j["variant"] = variant_name(log.variant);
    j["fs_hz"] = log.fs;
    j["duration_s"] = log.duration_s;
    j["rho2"] = log.rho2;
    j["seed"] = log.seed;
    j["taps"] = log.taps;
    j["stages"] = nlohmann::json::array();
    for (const auto& st : log.stages) {
        nlohmann::json s;
        s["index"] = st.index;
        s["start_s"] = st.start_s;
        s["end_s"] = st.end_s;
        s["steady_mean_sigma_y2"] = st.steady_mean_sigma_y2;
        s["steady_mean_sigma_e2"] = st.steady_mean_sigma_e2;
        s["steady_mean_alpha"] = st.steady_mean_alpha;
        s["alpha_zero_fraction"] = st.alpha_zero_fraction;
        s["postconv_samples"] = st.postconv_samples;
        s["postconv_ma_violations"] = st.postconv_ma_violations;
        s["max_sigma_y2_ma"] = st.max_sigma_y2_ma;
        s["w_end"] = st.w_end;
        j["stages"].push_back(std::move(s));
    }
    j["final_w"] = log.final_w;
    j["max_abs_y"] = log.max_abs_y;
    j["max_dhat_reconstruction_err"] = log.max_dhat_reconstruction_err;
    j["diverged"] = log.diverged;
    if (log.diverged) {
        j["divergence_sample"] = log.divergence_sample;
        j["divergence_message"] = log.divergence_message;
    }
    return j.dump(2);
}

std::vector<std::string> emit_outputs(const MetricsLog& log, const std::string& dir, bool want_csv,
                                      bool want_json_summary) {
    fs::create_directories(dir);
    std::vector<std::string> written;

    if (want_csv) {
        const std::string trace_path = (fs::path(dir) / "trace.csv").string();
        std::ofstream trace(trace_path);
        if (!trace) throw ConfigError("cannot write " + trace_path);
        trace << "n,t,x,d,y,e,alpha,gs_hat,sigma_y2_ma\n";
        for (const auto& r : log.rows) {
            trace << r.n << ',' << format_double(r.t) << ',' << format_double(r.x) << ','
                  << format_double(r.d) << ',' << format_double(r.y) << ',' << format_double(r.e)
                  << ',' << format_double(r.alpha) << ',' << format_double(r.gs_hat) << ','
                  << format_double(r.sigma_y2_ma) << '\n';
        }
        if (!trace) throw ConfigError("write failed: " + trace_path);
        written.push_back(trace_path);

        const std::string w_path = (fs::path(dir) / "weights.csv").string();
        std::ofstream wout(w_path);
        if (!wout) throw ConfigError("cannot write " + w_path);
        wout << "n";
        for (std::size_t i = 0; i < log.taps; ++i) wout << ",w" << i;
        wout << '\n';
        for (const auto& [n, w] : log.weight_snapshots) {
            wout << n;
            for (double wi : w) wout << ',' << format_double(wi);
            wout << '\n';
        }
        if (!wout) throw ConfigError("write failed: " + w_path);
        written.push_back(w_path);
    }

    if (want_json_summary) {
        const std::string s_path = (fs::path(dir) / "summary.json").string();
        std::ofstream sout(s_path);
        if (!sout) throw ConfigError("cannot write " + s_path);
        sout << summary_json(log) << '\n';
        if (!sout) throw ConfigError("write failed: " + s_path);
        written.push_back(s_path);
    }
    return written;
}

} // namespace anc
