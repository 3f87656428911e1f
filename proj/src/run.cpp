#include "hbt/run.hpp"

#include <cmath>

#include "hbt/errors.hpp"
#include "hbt/scan_io.hpp"

namespace hbt {

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

HbtRadii analytic_radii(const RunConfig& config, const SourceModel& model) {
    const SpaceTimeVariances v = variances(model, config.E_eV);
    if (config.corrections == "paper") return compose_radii(v, correction_terms(model.spectrum, config.E_eV));
    if (config.corrections == "matched")
        return compose_radii(v, mode_corrections(model.spectrum, config.E_eV, config.energy_mode));
    return compose_radii(v);
}

}  // namespace

ScanRequest scan_request(const RunConfig& config) {
    config.validate();
    ScanRequest req;
    req.kind = config.scan_kind;
    req.E = config.E_eV;
    if (config.clip) req.clip = config.window();
    if (config.scan_kind == ScanKind::transverse) {
        double xi_max = config.xi_max_eV;
        if (!(xi_max > 0.0)) xi_max = max_accessible_xi(config.E_eV, config.window());
        const auto xi = linear_grid(0.0, xi_max, config.points);
        for (double x : xi) req.grid.push_back(phi_from_xi(config.E_eV, x));
    } else if (config.scan_kind == ScanKind::longitudinal) {
        req.grid = linear_grid(0.0, config.q0_max_meV * units::eV_per_meV, config.points);
    } else {
        throw ConfigError("intercept curves come from the intercept command", "scan.kind");
    }
    return req;
}

ScanResult run_scan(const RunConfig& config) {
    const ScanRequest req = scan_request(config);
    const SourceModel model = config.source_model();
    ScanResult result;
    if (config.path == "analytic") {
        result = scan(analytic_radii(config, model), req, config.lambda);
        result.source_label = model.label();
    } else if (config.path == "quadrature") {
        result = scan(model, req, config.energy_mode, config.lambda, config.workers);
    } else {
        result = mc_correlator(model, req, {config.n_pairs, config.seed, config.workers, config.lambda});
    }
    result.config = config.embedded();
    return result;
}

InterceptCurve run_intercept(const RunConfig& config) {
    config.validate();
    std::vector<double> r_grid;
    const int n = config.intercept_points;
    const double lo = std::log(config.tau_min_fs);
    const double hi = std::log(config.tau_max_fs);
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        r_grid.push_back(units::light_travel_nm(std::exp(t)));
    }
    InterceptCurve out;
    if (config.delta_omega_eV > 0.0) {
        // Width given directly in energy: express it as an rms wavelength width.
        const double lambda_nm = units::wavelength_from_energy(config.E_eV);
        const double dlambda = config.delta_omega_eV * lambda_nm * lambda_nm / units::two_pi_hbar_c;
        out = intercept_curve(dlambda, lambda_nm, r_grid, WidthConvention::rms, config.lambda);
    } else {
        out = intercept_curve(config.dlambda_nm, units::wavelength_from_energy(config.E_eV), r_grid,
                              config.width_convention, config.lambda);
    }
    if (out.knee_fs) out.curve.metadata.emplace_back("knee_delta_tau_fs", format_number(*out.knee_fs));
    out.curve.config = config.embedded();
    return out;
}

ResolvabilityReport run_resolve(const RunConfig& config) {
    config.validate();
    const ResolveThresholds thresholds{config.marginal_floor, config.marginal_bandwidth_ratio};
    if (config.resolve_target == "transverse")
        return resolve_transverse(config.sigma_r_nm, config.E_eV, config.window(), config.instrument(), thresholds);
    return resolve_longitudinal(config.delta_tau_fs, config.instrument(), thresholds);
}

}  // namespace hbt
