// hbt: photon intensity-interferometry scans, fits and resolvability reports.
//
//   hbt scan --figure fig1
//   hbt scan --kind longitudinal --rpar-ps 1 --q0-max-meV 5
//   hbt intercept --figure fig3
//   hbt fit --input fig1_rperp_100nm.csv
//   hbt resolve --rperp-nm 10
//
// Exit codes: 0 ok, 2 config, 3 domain, 4 numerical, 5 unfittable.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbt/config.hpp"
#include "hbt/errors.hpp"
#include "hbt/extraction.hpp"
#include "hbt/run.hpp"
#include "hbt/scan_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitUnfittable = 5;

constexpr const char* kOutputDirEnv = "HBT_OUTPUT_DIR";

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    std::string figure;
    bool deterministic = false;
    std::optional<std::string> output_dir;

    // shorthand overrides, applied after config file and --set
    std::optional<std::string> kind, path, energy_mode, method, format, target, convention, input, file;
    std::optional<double> E, rperp_nm, rpar_ps, delta_tau_fs, q0_max_meV, xi_max, dlambda_nm, delta_omega_meV,
        angular_resolution_deg, lambda;
    std::optional<int> points;
    std::optional<std::string> n_pairs;  // parsed by the config, so 1e6 works
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

hbt::RunConfig resolve_config(const Options& o) {
    hbt::RunConfig c;
    if (!o.config_path.empty()) hbt::apply(c, hbt::parse_config_file(o.config_path));
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw hbt::ConfigError("--set expects section.key=value, got '" + s + "'");
        c.set(s.substr(0, eq), s.substr(eq + 1));
    }
    auto num = [](double v) { return hbt::format_number(v); };
    if (o.kind) c.set("scan.kind", *o.kind);
    if (o.path) c.set("engine.path", *o.path);
    if (o.energy_mode) c.set("scan.energy_mode", *o.energy_mode);
    if (o.method) c.set("fit.method", *o.method);
    if (o.format) c.set("output.format", *o.format);
    if (o.target) c.set("resolve.target", *o.target);
    if (o.convention) c.set("detector.width_convention", *o.convention);
    if (o.input) c.set("fit.input", *o.input);
    if (o.file) c.set("output.file", *o.file);
    if (o.E) c.set("detector.E_eV", num(*o.E));
    if (o.rperp_nm) c.set("source.sigma_r_nm", num(*o.rperp_nm));
    if (o.rpar_ps) {
        // R_par = c * delta_tau with no spatial extent along the pair
        c.set("source.delta_tau_fs", num(*o.rpar_ps * hbt::units::fs_per_ps));
        c.set("source.sigma_r_nm", "0");
    }
    if (o.delta_tau_fs) c.set("source.delta_tau_fs", num(*o.delta_tau_fs));
    if (o.q0_max_meV) c.set("scan.q0_max_meV", num(*o.q0_max_meV));
    if (o.xi_max) c.set("scan.xi_max_eV", num(*o.xi_max));
    if (o.dlambda_nm) c.set("detector.dlambda_nm", num(*o.dlambda_nm));
    if (o.delta_omega_meV) c.set("detector.delta_omega_eV", num(*o.delta_omega_meV * hbt::units::eV_per_meV));
    if (o.angular_resolution_deg) {
        c.set("detector.min_opening_angle_deg", num(*o.angular_resolution_deg));
        c.set("detector.angular_aperture_deg", num(*o.angular_resolution_deg));
    }
    if (o.lambda) c.set("engine.lambda", num(*o.lambda));
    if (o.points) {
        c.set("scan.points", std::to_string(*o.points));
        c.set("intercept.points", std::to_string(*o.points));
    }
    if (o.n_pairs) c.set("engine.n_pairs", *o.n_pairs);
    if (o.seed) c.set("engine.seed", std::to_string(*o.seed));
    if (o.workers) c.set("engine.workers", std::to_string(*o.workers));

    if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.dir = env;
    if (o.output_dir) c.dir = *o.output_dir;
    c.validate();
    return c;
}

std::vector<hbt::RunConfig> expand(const Options& o, const hbt::RunConfig& base) {
    if (o.figure.empty()) return {base};
    return hbt::figure_preset(o.figure, base);
}

fs::path output_path(const hbt::RunConfig& c) {
    fs::create_directories(c.dir);
    return fs::path(c.dir) / c.file;
}

std::optional<std::string> stamp(const Options& o) {
    if (o.deterministic) return std::nullopt;
    return utc_timestamp();
}

int cmd_scan(const Options& o) {
    for (const auto& c : expand(o, resolve_config(o))) {
        if (!o.figure.empty() && o.figure == "fig3")
            throw hbt::ConfigError("fig3 is an intercept preset; use 'hbt intercept --figure fig3'", "figure");
        const hbt::ScanResult result = hbt::run_scan(c);
        const fs::path path = output_path(c);
        hbt::write_scan_csv(path, result, stamp(o));
        std::cout << "wrote " << path.string() << " (" << result.size() << " points, " << hbt::to_string(result.kind)
                  << ", " << result.source_label << ")\n";
    }
    return 0;
}

int cmd_intercept(const Options& o) {
    hbt::RunConfig base = resolve_config(o);
    if (o.figure.empty() && !o.file) base.file = "intercept.csv";
    if (!o.figure.empty() && o.figure != "fig3")
        throw hbt::ConfigError("the intercept command only has the fig3 preset", "figure");
    for (const auto& c : expand(o, base)) {
        const hbt::InterceptCurve curve = hbt::run_intercept(c);
        const fs::path path = output_path(c);
        hbt::write_scan_csv(path, curve.curve, stamp(o));
        std::cout << "wrote " << path.string() << " (" << curve.curve.size() << " points)\n";
        if (curve.knee_fs)
            std::cout << "knee_delta_tau_fs=" << *curve.knee_fs << "\nknee_r_par_nm=" << *curve.knee_r_par_nm << '\n';
        else
            std::cout << "knee_delta_tau_fs=none\n";
    }
    return 0;
}

int cmd_fit(const Options& o) {
    const hbt::RunConfig c = resolve_config(o);
    if (c.fit_input.empty()) throw hbt::ConfigError("no input scan (--input)", "fit.input");
    const hbt::ScanResult data = hbt::read_scan_csv(fs::path(c.fit_input));
    const hbt::FitResult fit = hbt::fit_scan(data, c.fit_method);
    std::cout << (c.format == "json" ? hbt::to_json(fit) : hbt::to_key_value(fit));
    return 0;
}

int cmd_resolve(const Options& o) {
    const hbt::RunConfig c = resolve_config(o);
    const hbt::ResolvabilityReport rep = hbt::run_resolve(c);
    std::cout << (c.format == "json" ? hbt::to_json(rep) : hbt::to_key_value(rep));
    return 0;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "config file, or a scan CSV with embedded config");
    cmd->add_option("--set", o.sets, "override a key: section.key=value");
    cmd->add_option("--output-dir", o.output_dir, "output directory (also $HBT_OUTPUT_DIR)");
    cmd->add_flag("--deterministic", o.deterministic, "omit the timestamp header line");
    cmd->add_option("--E", o.E, "pair energy [eV]");
    cmd->add_option("--format", o.format, "report format: kv|json");
    cmd->add_option("--lambda", o.lambda, "correlation strength (default 0.5)");
    cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
    cmd->add_option("--points", o.points, "grid points");
    cmd->add_option("--output", o.file, "output file name inside the output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon HBT correlator scans, fits and resolvability"};
    app.require_subcommand(1);
    Options o;

    auto* scan = app.add_subcommand("scan", "correlator scan to CSV");
    add_common(scan, o);
    scan->add_option("--figure", o.figure, "preset: fig1|fig2");
    scan->add_option("--kind", o.kind, "transverse|longitudinal");
    scan->add_option("--engine", o.path, "analytic|quadrature|mc");
    scan->add_option("--energy-mode", o.energy_mode, "on_shell|exact");
    scan->add_option("--rperp-nm", o.rperp_nm, "transverse rms radius [nm]");
    scan->add_option("--rpar-ps", o.rpar_ps, "R_par / c [ps]");
    scan->add_option("--delta-tau-fs", o.delta_tau_fs, "rms flash duration [fs]");
    scan->add_option("--q0-max-meV", o.q0_max_meV, "longitudinal grid end [meV]");
    scan->add_option("--xi-max", o.xi_max, "transverse grid end [eV]");
    scan->add_option("--n-pairs", o.n_pairs, "Monte Carlo pairs per point");
    scan->add_option("--seed", o.seed, "Monte Carlo master seed");

    auto* intercept = app.add_subcommand("intercept", "effective intercept vs flash duration");
    add_common(intercept, o);
    intercept->add_option("--figure", o.figure, "preset: fig3");
    intercept->add_option("--dlambda-nm", o.dlambda_nm, "filter width [nm]");
    intercept->add_option("--convention", o.convention, "rms|fwhm");

    auto* fit = app.add_subcommand("fit", "Gaussian fit of a scan CSV");
    add_common(fit, o);
    fit->add_option("--input", o.input, "scan CSV")->required();
    fit->add_option("--method", o.method, "linearized_log|nonlinear_ls");

    auto* resolve = app.add_subcommand("resolve", "resolvability report");
    add_common(resolve, o);
    resolve->add_option("--target", o.target, "transverse|longitudinal");
    resolve->add_option("--rperp-nm", o.rperp_nm, "transverse rms radius [nm]");
    resolve->add_option("--delta-tau-fs", o.delta_tau_fs, "rms flash duration [fs]");
    resolve->add_option("--dlambda-nm", o.dlambda_nm, "filter width [nm]");
    resolve->add_option("--delta-omega-meV", o.delta_omega_meV, "filter width [meV], overrides --dlambda-nm");
    resolve->add_option("--angular-resolution-deg", o.angular_resolution_deg, "instrument angular resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (scan->parsed()) return cmd_scan(o);
        if (intercept->parsed()) return cmd_intercept(o);
        if (fit->parsed()) return cmd_fit(o);
        return cmd_resolve(o);
    } catch (const hbt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const hbt::UnfittableError& e) {
        std::cerr << "unfittable: " << e.what() << '\n';
        return kExitUnfittable;
    } catch (const hbt::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const hbt::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const hbt::ApproximationBreakdownError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
