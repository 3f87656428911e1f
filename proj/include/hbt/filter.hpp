#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>

#include "hbt/correlator.hpp"
#include "hbt/source.hpp"

namespace hbt {

enum class WidthConvention { rms, fwhm };

const char* to_string(WidthConvention convention);
WidthConvention width_convention_from_string(const std::string& name);

// FWHM of a Gaussian in units of its standard deviation.
inline const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

// Gaussian band-pass filter f(w) = exp(-(w - center)^2 / (2 width^2)) / (sqrt(2 pi) width).
struct FilterSpec {
    double center = 3.0;  // eV
    double width = 0.0;   // eV, standard deviation

    static FilterSpec from_energy(double center_eV, double width_eV);
    // width = 2 pi hbar c / lambda^2 * dlambda, dlambda read as rms or FWHM.
    static FilterSpec from_wavelength(double lambda_nm, double dlambda_nm,
                                      WidthConvention convention = WidthConvention::rms);

    double profile(double omega) const;       // normalized density [1/eV]
    double transmission(double omega) const;  // peak 1
    double center_wavelength_nm() const { return units::wavelength_from_energy(center); }

    // Throws DomainError unless width > 0 and width / center < 0.1.
    void validate() const;
};

// Energy width of a wavelength band, without the narrow-band checks.
double filter_width_eV(double lambda_nm, double dlambda_nm, WidthConvention convention = WidthConvention::rms);

// f_a(w1) f_b(w2) against f_{K0, dw/sqrt2}(w_bar) f_{q0, sqrt2 dw}(dw12),
// w_bar = (w1 + w2)/2, dw12 = w1 - w2. The Jacobian of the change of
// variables is 1, so the ratio is 1 wherever it is evaluated.
struct FilterProductCheck {
    double lhs;
    double rhs;
    double ratio() const { return lhs / rhs; }
};

// UnsupportedConfigurationError if the two widths differ (1e-12 relative).
FilterProductCheck filter_product_identity_check(const FilterSpec& f_a, const FilterSpec& f_b, double omega_1,
                                                 double omega_2);

// C(q = 0) = 1 + lambda / sqrt(1 + 4 dw^2 R_par^2 / (hbar c)^2)
double effective_intercept(double delta_omega_eV, double r_par_nm, double lambda = kEqualHelicityFraction);

// Flash duration [fs] where dw R_par / (hbar c) = 1.
double knee_duration_fs(double delta_omega_eV);

enum class DenominatorMode { smoothness, full };

const char* to_string(DenominatorMode mode);
DenominatorMode denominator_mode_from_string(const std::string& name);

// Correlator seen through the two filters: numerator and denominator
// integrated over (w_bar, dw12) with Gauss-Hermite rules of n_quad nodes,
// truncated at +-5 widths around each filter center. DomainError if a
// truncated passband leaves the spectrum domain.
CorrelatorPoint averaged_correlator(const SourceModel& model, const FilterSpec& f_a, const FilterSpec& f_b,
                                    double phi, int n_quad = 32, DenominatorMode mode = DenominatorMode::full,
                                    double lambda = kEqualHelicityFraction);

struct InterceptCurve {
    ScanResult curve;  // abscissa: flash duration [fs]
    std::optional<double> knee_fs;
    std::optional<double> knee_r_par_nm;
};

// effective_intercept over an R_par grid [nm] for a filter of width dlambda
// at lambda_center. dlambda = 0 gives the unfiltered constant 1 + lambda.
InterceptCurve intercept_curve(double dlambda_nm, double lambda_center_nm, std::span<const double> r_par_grid_nm,
                               WidthConvention convention = WidthConvention::rms,
                               double lambda = kEqualHelicityFraction);

// int T_a s dw * int T_b s dw with peak-normalized transmissions; the pair
// coincidence acceptance, which scales as dlambda^2 for narrow filters.
double coincidence_acceptance(const Spectrum& spectrum, const FilterSpec& f_a, const FilterSpec& f_b,
                              int n_quad = 32);

}  // namespace hbt
