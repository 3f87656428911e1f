#include "hbt/filter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hbt/errors.hpp"
#include "hbt/quadrature.hpp"

namespace hbt {

namespace {

constexpr double kSupportWidths = 5.0;
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

double log_gaussian(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrtTwoPi;
}

// Gaussian measure N(mean, sd^2) times exp(-a x^2), renormalized.
struct Measure {
    double mean;
    double sd;
};

Measure product_measure(double mean, double sd, double a) {
    const double precision = 1.0 / (sd * sd) + 2.0 * a;
    return {mean / (sd * sd) / precision, 1.0 / std::sqrt(precision)};
}

double log_form_factor(const SourceModel& model, double omega_1, double omega_2, const Eigen::Vector3d& e_a,
                       const Eigen::Vector3d& e_b) {
    Eigen::Vector4d q;
    q[0] = omega_1 - omega_2;
    q.tail<3>() = omega_1 * e_a - omega_2 * e_b;
    if (!model.flow.active()) {
        const GaussianSource& g = model.geometry;
        const double spatial = q.tail<3>().squaredNorm() * g.sigma_r_nm * g.sigma_r_nm;
        const double temporal = q[0] * q[0] * units::c * units::c * g.delta_tau_fs * g.delta_tau_fs;
        return -(spatial + temporal) / (units::hbar_c * units::hbar_c);
    }
    const Eigen::Vector3d k_hat = (omega_1 * e_a + omega_2 * e_b).normalized();
    return std::log(spacetime_form_factor(model, q, k_hat, 0.5 * (omega_1 + omega_2)));
}

void require_support(const Spectrum& spectrum, const FilterSpec& f) {
    const double lo = f.center - kSupportWidths * f.width;
    const double hi = f.center + kSupportWidths * f.width;
    if (!spectrum.domain().contains(lo) || !spectrum.domain().contains(hi)) {
        std::ostringstream msg;
        msg << "filter passband [" << lo << ", " << hi << "] eV leaves the spectrum domain ["
            << spectrum.domain().min << ", " << spectrum.domain().max << "] eV";
        throw DomainError(msg.str());
    }
}

bool in_support(const FilterSpec& f, double omega) {
    return std::abs(omega - f.center) <= kSupportWidths * f.width;
}

// int f(w) s(w) dw over the truncated passband.
double filtered_spectrum(const Spectrum& spectrum, const FilterSpec& f, const GaussHermiteRule& rule) {
    double sum = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
        const double omega = f.center + f.width * rule.nodes[i];
        if (in_support(f, omega)) sum += rule.weights[i] * spectrum(omega);
    }
    return sum;
}

}  // namespace

const char* to_string(WidthConvention convention) {
    return convention == WidthConvention::rms ? "rms" : "fwhm";
}

WidthConvention width_convention_from_string(const std::string& name) {
    if (name == "rms") return WidthConvention::rms;
    if (name == "fwhm") return WidthConvention::fwhm;
    throw DomainError("unknown width convention '" + name + "'");
}

const char* to_string(DenominatorMode mode) {
    return mode == DenominatorMode::smoothness ? "smoothness" : "full";
}

DenominatorMode denominator_mode_from_string(const std::string& name) {
    if (name == "smoothness") return DenominatorMode::smoothness;
    if (name == "full") return DenominatorMode::full;
    throw DomainError("unknown denominator mode '" + name + "'");
}

double filter_width_eV(double lambda_nm, double dlambda_nm, WidthConvention convention) {
    if (!(lambda_nm > 0.0) || dlambda_nm < 0.0) throw DomainError("filter wavelength must be positive");
    const double rms = convention == WidthConvention::fwhm ? dlambda_nm / kFwhmPerSigma : dlambda_nm;
    return units::energy_width_from_wavelength_width(lambda_nm, rms);
}

FilterSpec FilterSpec::from_energy(double center_eV, double width_eV) {
    FilterSpec f{center_eV, width_eV};
    f.validate();
    return f;
}

FilterSpec FilterSpec::from_wavelength(double lambda_nm, double dlambda_nm, WidthConvention convention) {
    return from_energy(units::energy_from_wavelength(lambda_nm), filter_width_eV(lambda_nm, dlambda_nm, convention));
}

double FilterSpec::profile(double omega) const {
    return std::exp(log_gaussian(omega, center, width));
}

double FilterSpec::transmission(double omega) const {
    const double z = (omega - center) / width;
    return std::exp(-0.5 * z * z);
}

void FilterSpec::validate() const {
    if (!(center > 0.0)) throw DomainError("filter center must be positive");
    if (!(width > 0.0)) throw DomainError("filter width must be positive");
    if (!(width / center < 0.1)) throw DomainError("filter is not narrow-band (width/center >= 0.1)");
}

FilterProductCheck filter_product_identity_check(const FilterSpec& f_a, const FilterSpec& f_b, double omega_1,
                                                 double omega_2) {
    f_a.validate();
    f_b.validate();
    if (std::abs(f_a.width - f_b.width) > 1e-12 * std::max(f_a.width, f_b.width))
        throw UnsupportedConfigurationError("filter product identity needs equal filter widths");
    const double w = f_a.width;
    const double log_lhs = log_gaussian(omega_1, f_a.center, w) + log_gaussian(omega_2, f_b.center, w);
    const double log_rhs = log_gaussian(0.5 * (omega_1 + omega_2), 0.5 * (f_a.center + f_b.center), w / std::sqrt(2.0)) +
                           log_gaussian(omega_1 - omega_2, f_a.center - f_b.center, w * std::sqrt(2.0));
    return {std::exp(log_lhs), std::exp(log_rhs)};
}

double effective_intercept(double delta_omega_eV, double r_par_nm, double lambda) {
    if (delta_omega_eV < 0.0 || r_par_nm < 0.0) throw DomainError("filter width and R_par must be non-negative");
    const double x = delta_omega_eV * r_par_nm / units::hbar_c;
    return 1.0 + lambda / std::sqrt(1.0 + 4.0 * x * x);
}

double knee_duration_fs(double delta_omega_eV) {
    if (!(delta_omega_eV > 0.0)) throw DomainError("knee needs a positive filter width");
    return units::hbar_c / (units::c * delta_omega_eV);
}

CorrelatorPoint averaged_correlator(const SourceModel& model, const FilterSpec& f_a, const FilterSpec& f_b,
                                    double phi, int n_quad, DenominatorMode mode, double lambda) {
    model.validate();
    f_a.validate();
    f_b.validate();
    if (std::abs(f_a.width - f_b.width) > 1e-12 * std::max(f_a.width, f_b.width))
        throw UnsupportedConfigurationError("filter averaging needs equal filter widths");
    require_support(model.spectrum, f_a);
    require_support(model.spectrum, f_b);

    const auto [k_a, k_b] = detector_momenta(f_a.center, f_b.center, phi);
    const Eigen::Vector3d& e_a = k_a.direction;
    const Eigen::Vector3d& e_b = k_b.direction;
    const GaussHermiteRule& rule = gauss_hermite_rule(n_quad);
    const double dw = f_a.width;
    const double hc2 = units::hbar_c * units::hbar_c;
    const GaussianSource& g = model.geometry;

    // Integrate over (w_bar, dw12) against the filter Gaussians times the
    // Gaussian part of the form factor, so narrow peaks are still resolved.
    const double cos_half = std::cos(0.5 * phi);
    const double sin_half = std::sin(0.5 * phi);
    const double a_diff = (g.sigma_r_nm * g.sigma_r_nm * cos_half * cos_half +
                           units::c * units::c * g.delta_tau_fs * g.delta_tau_fs) / hc2;
    const double a_mean = 4.0 * g.sigma_r_nm * g.sigma_r_nm * sin_half * sin_half / hc2;
    const double K0 = 0.5 * (f_a.center + f_b.center);
    const double q0 = f_a.center - f_b.center;
    const Measure mean_measure = product_measure(K0, dw / std::sqrt(2.0), a_mean);
    const Measure diff_measure = product_measure(q0, dw * std::sqrt(2.0), a_diff);

    double numerator = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
        const double w_bar = mean_measure.mean + mean_measure.sd * rule.nodes[i];
        const double log_mu_bar = log_gaussian(w_bar, mean_measure.mean, mean_measure.sd);
        for (int j = 0; j < rule.order(); ++j) {
            const double diff = diff_measure.mean + diff_measure.sd * rule.nodes[j];
            const double omega_1 = w_bar + 0.5 * diff;
            const double omega_2 = w_bar - 0.5 * diff;
            if (!in_support(f_a, omega_1) || !in_support(f_b, omega_2)) continue;
            const double log_integrand = log_gaussian(omega_1, f_a.center, dw) + log_gaussian(omega_2, f_b.center, dw) +
                                         2.0 * model.spectrum.log_value(w_bar) +
                                         log_form_factor(model, omega_1, omega_2, e_a, e_b);
            const double log_mu = log_mu_bar + log_gaussian(diff, diff_measure.mean, diff_measure.sd);
            numerator += rule.weights[i] * rule.weights[j] * std::exp(log_integrand - log_mu);
        }
    }

    double denominator = 0.0;
    if (mode == DenominatorMode::full) {
        denominator = filtered_spectrum(model.spectrum, f_a, rule) * filtered_spectrum(model.spectrum, f_b, rule);
    } else {
        const FilterSpec mean_filter{K0, dw / std::sqrt(2.0)};
        for (int i = 0; i < rule.order(); ++i) {
            const double w_bar = K0 + mean_filter.width * rule.nodes[i];
            if (std::abs(w_bar - K0) <= kSupportWidths * dw) {
                const double s = model.spectrum(w_bar);
                denominator += rule.weights[i] * s * s;
            }
        }
    }

    return {pair_from_detector(f_a.center, f_b.center, phi), 1.0 + lambda * numerator / denominator, 0.0,
            EvalPath::quadrature};
}

InterceptCurve intercept_curve(double dlambda_nm, double lambda_center_nm, std::span<const double> r_par_grid_nm,
                               WidthConvention convention, double lambda) {
    if (r_par_grid_nm.empty()) throw DomainError("empty R_par grid");
    const double E = units::energy_from_wavelength(lambda_center_nm);
    const double dw = filter_width_eV(lambda_center_nm, dlambda_nm, convention);
    if (dw > 0.0) FilterSpec::from_energy(E, dw);

    InterceptCurve out;
    ScanResult& curve = out.curve;
    curve.kind = ScanKind::intercept;
    curve.E = E;
    std::ostringstream label;
    label << "filter(lambda=" << lambda_center_nm << " nm, dlambda=" << dlambda_nm << " nm " << to_string(convention)
          << ")";
    curve.source_label = label.str();
    const PairKinematicsd k = pair_from_detector(E, E, 0.0);
    for (double r : r_par_grid_nm) {
        curve.abscissae.push_back(r / units::c);
        curve.points.push_back({k, effective_intercept(dw, r, lambda), 0.0, EvalPath::analytic});
    }
    curve.validate();

    std::ostringstream width;
    width.precision(17);
    width << dw;
    curve.metadata = {{"engine", "analytic"}, {"delta_omega_eV", width.str()}};
    if (dw > 0.0) {
        out.knee_fs = knee_duration_fs(dw);
        out.knee_r_par_nm = units::hbar_c / dw;
    }
    return out;
}

double coincidence_acceptance(const Spectrum& spectrum, const FilterSpec& f_a, const FilterSpec& f_b, int n_quad) {
    f_a.validate();
    f_b.validate();
    require_support(spectrum, f_a);
    require_support(spectrum, f_b);
    const GaussHermiteRule& rule = gauss_hermite_rule(n_quad);
    const double norm = std::sqrt(2.0 * std::numbers::pi);
    return norm * f_a.width * filtered_spectrum(spectrum, f_a, rule) * norm * f_b.width *
           filtered_spectrum(spectrum, f_b, rule);
}

}  // namespace hbt
