#include "hbt/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include "hbt/errors.hpp"

namespace hbt {

const char* to_string(FitMethod method) {
    return method == FitMethod::linearized_log ? "linearized_log" : "nonlinear_ls";
}

FitMethod fit_method_from_string(const std::string& name) {
    if (name == "linearized_log" || name == "linear") return FitMethod::linearized_log;
    if (name == "nonlinear_ls" || name == "nonlinear") return FitMethod::nonlinear_ls;
    throw DomainError("unknown fit method '" + name + "'");
}

namespace {

struct FitData {
    Eigen::VectorXd x;      // q^2 [eV^2]
    Eigen::VectorXd y;      // C - 1
    Eigen::VectorXd sigma;  // stat_error, or 1
    bool weighted = false;
};

FitData collect(const ScanResult& scan, const FitOptions& options, bool log_fit) {
    if (scan.kind == ScanKind::intercept) throw UnfittableError("intercept curves carry no radius");
    const bool weighted = std::any_of(scan.points.begin(), scan.points.end(),
                                      [](const CorrelatorPoint& p) { return p.stat_error > 0.0; });
    std::vector<double> xs, ys, ss;
    for (const auto& p : scan.points) {
        const double x = scan.kind == ScanKind::transverse ? p.kinematics.q_perp * p.kinematics.q_perp
                                                           : p.kinematics.q_par * p.kinematics.q_par;
        const double y = p.value - 1.0;
        if (weighted && !(p.stat_error > 0.0)) continue;
        if (log_fit && !(y > (weighted ? p.stat_error : options.deterministic_floor))) continue;
        xs.push_back(x);
        ys.push_back(y);
        ss.push_back(weighted ? p.stat_error : 1.0);
    }
    if (xs.size() < options.min_points) {
        std::ostringstream msg;
        msg << xs.size() << " usable points above the noise floor, need " << options.min_points;
        throw UnfittableError(msg.str());
    }
    FitData d;
    d.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    d.sigma = Eigen::Map<Eigen::VectorXd>(ss.data(), static_cast<Eigen::Index>(ss.size()));
    d.weighted = weighted;

    const double top = d.y.maxCoeff();
    const double fall = top - d.y.minCoeff();
    if (!(top > 0.0) || fall / top < options.min_suppression) {
        std::ostringstream msg;
        msg << "C - 1 falls by only " << (top > 0.0 ? 100.0 * fall / top : 0.0)
            << "% across the scan, the radius is not constrained";
        throw UnfittableError(msg.str());
    }
    return d;
}

FitResult finish(double A, double r_sq, const Eigen::Matrix2d& cov_a_rsq, double chi2, std::size_t n,
                 FitMethod method) {
    if (r_sq < 0.0) {
        std::ostringstream msg;
        msg << "approximation breakdown: fitted R^2 = " << r_sq << " nm^2 is negative";
        throw ApproximationBreakdownError(msg.str());
    }
    FitResult r;
    r.method = method;
    r.n_points = n;
    r.intercept = 1.0 + A;
    r.intercept_err = std::sqrt(std::max(0.0, cov_a_rsq(0, 0)));
    r.radius = std::sqrt(r_sq);
    const double r_sq_err = std::sqrt(std::max(0.0, cov_a_rsq(1, 1)));
    r.radius_err = r.radius > 0.0 ? 0.5 * r_sq_err / r.radius : std::sqrt(r_sq_err);
    r.chi2_per_dof = n > 2 ? chi2 / static_cast<double>(n - 2) : 0.0;
    return r;
}

FitResult linearized_fit(const FitData& d) {
    const Eigen::Index n = d.x.size();
    const double hc2 = units::hbar_c * units::hbar_c;
    // ln(C - 1) = a + b x, sigma_ln = sigma / (C - 1)
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = d.weighted ? d.sigma[i] / d.y[i] : 1.0;
        w[i] = 1.0 / s;
    }
    Eigen::MatrixXd X(n, 2);
    X.col(0).setOnes();
    X.col(1) = d.x;
    const Eigen::MatrixXd Xw = w.asDiagonal() * X;
    const Eigen::VectorXd yw = w.asDiagonal() * d.y.array().log().matrix();
    const Eigen::Vector2d beta = Xw.colPivHouseholderQr().solve(yw);
    const double chi2 = (Xw * beta - yw).squaredNorm();
    Eigen::Matrix2d cov = (Xw.transpose() * Xw).inverse();
    if (!d.weighted && n > 2) cov *= chi2 / static_cast<double>(n - 2);

    const double A = std::exp(beta[0]);
    // (a, b) -> (A, R^2): dA/da = A, dR^2/db = -hc2
    Eigen::Matrix2d J;
    J << A, 0.0, 0.0, -hc2;
    return finish(A, -beta[1] * hc2, J * cov * J.transpose(), chi2, static_cast<std::size_t>(n),
                  FitMethod::linearized_log);
}

// Residuals (y - A exp(-p x s)) / sigma in parameters (A, p), R^2 = p * scale.
struct GaussianResiduals {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const FitData& d;
    double scale;  // R^2 unit [nm^2]

    int inputs() const { return 2; }
    int values() const { return static_cast<int>(d.x.size()); }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
        const double k = p[1] * scale / (units::hbar_c * units::hbar_c);
        for (Eigen::Index i = 0; i < d.x.size(); ++i) r[i] = (d.y[i] - p[0] * std::exp(-k * d.x[i])) / d.sigma[i];
        return 0;
    }
    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
        const double hc2 = units::hbar_c * units::hbar_c;
        const double k = p[1] * scale / hc2;
        for (Eigen::Index i = 0; i < d.x.size(); ++i) {
            const double e = std::exp(-k * d.x[i]);
            J(i, 0) = -e / d.sigma[i];
            J(i, 1) = p[0] * e * d.x[i] * scale / hc2 / d.sigma[i];
        }
        return 0;
    }
};

FitResult nonlinear_fit(const FitData& d, const FitResult& start) {
    const double scale = std::max(start.radius * start.radius, 1.0);
    GaussianResiduals f{d, scale};
    Eigen::VectorXd p(2);
    p << start.intercept - 1.0, start.radius * start.radius / scale;
    Eigen::LevenbergMarquardt<GaussianResiduals> lm(f);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 2000;
    const auto status = lm.minimize(p);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
        throw NumericalError("Levenberg-Marquardt rejected its input");

    const Eigen::Index n = d.x.size();
    Eigen::VectorXd r(n);
    Eigen::MatrixXd J(n, 2);
    f(p, r);
    f.df(p, J);
    const double chi2 = r.squaredNorm();
    Eigen::Matrix2d cov = (J.transpose() * J).inverse();
    if (!d.weighted && n > 2) cov *= chi2 / static_cast<double>(n - 2);
    Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
    S(1, 1) = scale;
    return finish(p[0], p[1] * scale, S * cov * S, chi2, static_cast<std::size_t>(n), FitMethod::nonlinear_ls);
}

}  // namespace

FitResult fit_scan(const ScanResult& scan, FitMethod method, const FitOptions& options) {
    scan.validate();
    const FitResult linear = linearized_fit(collect(scan, options, true));
    if (method == FitMethod::linearized_log) return linear;
    return nonlinear_fit(collect(scan, options, false), linear);
}

PulseLength pulse_length_from_intercept(double measured_intercept, double delta_omega_eV, double lambda) {
    if (!(delta_omega_eV > 0.0)) throw DomainError("filter width must be positive");
    const double d = measured_intercept - 1.0;
    if (!(d > 0.0))
        throw DomainError("chaoticity violation: intercept <= 1 is outside the chaotic-source model");
    if (d > lambda) throw DomainError("intercept above the chaotic limit 1 + lambda");
    if (d == lambda) return {0.0, 0.0};
    const double r = units::hbar_c / (2.0 * delta_omega_eV) * std::sqrt((lambda - d) * (lambda + d)) / d;
    return {r, r / units::c};
}

const char* to_string(ResolveTarget target) {
    return target == ResolveTarget::transverse_radius ? "transverse_radius" : "pulse_length";
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::resolvable: return "resolvable";
        case Verdict::marginal: return "marginal";
        case Verdict::unresolvable: return "unresolvable";
    }
    return "unknown";
}

const char* to_string(LimitingFactor factor) {
    switch (factor) {
        case LimitingFactor::window_edge: return "window_edge";
        case LimitingFactor::angular_resolution: return "angular_resolution";
        case LimitingFactor::filter_bandwidth: return "filter_bandwidth";
    }
    return "unknown";
}

ResolvabilityReport resolve_transverse(double r_perp_nm, double E, const TransparencyWindow& window,
                                       const Instrument& instrument, const ResolveThresholds& thresholds) {
    if (!(r_perp_nm > 0.0)) throw DomainError("R_perp must be positive");
    ResolvabilityReport rep;
    rep.target = ResolveTarget::transverse_radius;
    rep.radius_nm = r_perp_nm;
    rep.E = E;
    rep.xi_max = max_accessible_xi(E, window);
    rep.xi_one_over_e = units::hbar_c / r_perp_nm;
    rep.phi_one_over_e_deg = phi_from_xi(E, rep.xi_one_over_e) * units::rad_to_deg;
    const double edge = rep.xi_max * r_perp_nm / units::hbar_c;
    rep.edge_suppression = -std::expm1(-edge * edge);

    const double window_headroom = rep.xi_max / rep.xi_one_over_e;
    const double angle_headroom = rep.phi_one_over_e_deg / instrument.angular_resolution_deg();
    const bool in_window = window_headroom >= 1.0;
    const bool above_resolution = angle_headroom > 1.0;

    if (in_window && above_resolution)
        rep.verdict = Verdict::resolvable;
    else if (rep.edge_suppression >= thresholds.marginal_floor && rep.edge_suppression <= -std::expm1(-1.0))
        rep.verdict = Verdict::marginal;
    else
        rep.verdict = Verdict::unresolvable;

    if (window_headroom <= angle_headroom) {
        rep.limiting_factor = LimitingFactor::window_edge;
        // Upper window edge that would bring the 1/e point inside.
        rep.required_value = std::hypot(E, 0.5 * rep.xi_one_over_e);
        rep.required_unit = "eV";
    } else {
        rep.limiting_factor = LimitingFactor::angular_resolution;
        rep.required_value = rep.phi_one_over_e_deg;
        rep.required_unit = "deg";
    }
    return rep;
}

ResolvabilityReport resolve_longitudinal(double delta_tau_fs, const Instrument& instrument,
                                         const ResolveThresholds& thresholds) {
    if (!(delta_tau_fs > 0.0)) throw DomainError("flash duration must be positive");
    if (!(instrument.delta_omega_eV > 0.0)) throw DomainError("longitudinal resolvability needs a filter width");
    ResolvabilityReport rep;
    rep.target = ResolveTarget::pulse_length;
    rep.radius_nm = units::light_travel_nm(delta_tau_fs);
    rep.bandwidth_ratio = instrument.delta_omega_eV * rep.radius_nm / units::hbar_c;
    if (rep.bandwidth_ratio <= 1.0)
        rep.verdict = Verdict::resolvable;
    else if (rep.bandwidth_ratio <= thresholds.marginal_bandwidth_ratio)
        rep.verdict = Verdict::marginal;
    else
        rep.verdict = Verdict::unresolvable;
    rep.limiting_factor = LimitingFactor::filter_bandwidth;
    rep.required_value = units::hbar_c / rep.radius_nm / units::eV_per_meV;
    rep.required_unit = "meV";
    return rep;
}

namespace {

nlohmann::ordered_json json_of(const FitResult& fit) {
    nlohmann::ordered_json j;
    j["method"] = to_string(fit.method);
    j["radius_nm"] = fit.radius;
    j["radius_err_nm"] = fit.radius_err;
    j["intercept"] = fit.intercept;
    j["intercept_err"] = fit.intercept_err;
    j["chi2_per_dof"] = fit.chi2_per_dof;
    j["n_points"] = fit.n_points;
    return j;
}

nlohmann::ordered_json json_of(const ResolvabilityReport& rep) {
    nlohmann::ordered_json j;
    j["target"] = to_string(rep.target);
    j["verdict"] = to_string(rep.verdict);
    j["limiting_factor"] = to_string(rep.limiting_factor);
    j["required_setting"] = rep.required_value;
    j["required_setting_unit"] = rep.required_unit;
    j["radius_nm"] = rep.radius_nm;
    if (rep.target == ResolveTarget::transverse_radius) {
        j["E_eV"] = rep.E;
        j["xi_max_eV"] = rep.xi_max;
        j["xi_one_over_e_eV"] = rep.xi_one_over_e;
        j["phi_one_over_e_deg"] = rep.phi_one_over_e_deg;
        j["edge_suppression"] = rep.edge_suppression;
    } else {
        j["bandwidth_ratio"] = rep.bandwidth_ratio;
    }
    return j;
}

std::string flatten(const nlohmann::ordered_json& j) {
    std::ostringstream out;
    out.precision(10);
    for (const auto& [key, value] : j.items()) {
        out << key << '=';
        if (value.is_string())
            out << value.get<std::string>();
        else if (value.is_number_float())
            out << value.get<double>();
        else
            out << value.dump();
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string to_key_value(const FitResult& fit) { return flatten(json_of(fit)); }
std::string to_json(const FitResult& fit) { return json_of(fit).dump(2) + "\n"; }
std::string to_key_value(const ResolvabilityReport& report) { return flatten(json_of(report)); }
std::string to_json(const ResolvabilityReport& report) { return json_of(report).dump(2) + "\n"; }

}  // namespace hbt
