#pragma once

#include <algorithm>
#include <cstddef>
#include <string>

#include "hbt/correlator.hpp"
#include "hbt/kinematics.hpp"

namespace hbt {

enum class FitMethod { linearized_log, nonlinear_ls };

const char* to_string(FitMethod method);
FitMethod fit_method_from_string(const std::string& name);

struct FitOptions {
    // Deterministic points with C - 1 below this are left out of the log fit.
    double deterministic_floor = 1e-6;
    // Smallest relative fall-off of C - 1 across the scan that still
    // constrains a radius; flatter scans are unfittable.
    double min_suppression = 0.01;
    std::size_t min_points = 5;
};

struct FitResult {
    double radius = 0.0;  // nm
    double radius_err = 0.0;
    double intercept = 1.0;
    double intercept_err = 0.0;
    double chi2_per_dof = 0.0;
    FitMethod method = FitMethod::linearized_log;
    std::size_t n_points = 0;
};

// Gaussian fit C = 1 + A exp(-R^2 x / (hbar c)^2) with x = q_perp^2 on
// transverse scans and q_par^2 on longitudinal ones. Weighted by stat_error
// when present, unit weights (covariance scaled by chi2/dof) otherwise.
// UnfittableError when the scan carries no radius information,
// ApproximationBreakdownError when the fitted R^2 is negative.
FitResult fit_scan(const ScanResult& scan, FitMethod method = FitMethod::nonlinear_ls, const FitOptions& options = {});

struct PulseLength {
    double r_par_nm;
    double delta_tau_fs;
};

// Inverse of effective_intercept: R_par = (hbar c / 2 dw) sqrt((lambda/(C-1))^2 - 1).
// C = 1 + lambda gives zero duration; C above it, or C <= 1, is a DomainError.
PulseLength pulse_length_from_intercept(double measured_intercept, double delta_omega_eV,
                                        double lambda = kEqualHelicityFraction);

enum class ResolveTarget { transverse_radius, pulse_length };
enum class Verdict { resolvable, marginal, unresolvable };
enum class LimitingFactor { window_edge, angular_resolution, filter_bandwidth };

const char* to_string(ResolveTarget target);
const char* to_string(Verdict verdict);
const char* to_string(LimitingFactor factor);

struct Instrument {
    double min_opening_angle_deg = 1.0;
    double angular_aperture_deg = 1.0;
    double delta_omega_eV = 0.0;

    double angular_resolution_deg() const { return std::max(min_opening_angle_deg, angular_aperture_deg); }
};

struct ResolveThresholds {
    // Fraction of C - 1 lost at the window edge that still counts as marginal.
    double marginal_floor = 0.20;
    // Longitudinal: dw R_par / (hbar c) up to this value is marginal.
    double marginal_bandwidth_ratio = 1.2;
};

struct ResolvabilityReport {
    ResolveTarget target = ResolveTarget::transverse_radius;
    Verdict verdict = Verdict::unresolvable;
    LimitingFactor limiting_factor = LimitingFactor::window_edge;
    double required_value = 0.0;
    std::string required_unit;
    double radius_nm = 0.0;
    // transverse
    double E = 0.0;
    double xi_max = 0.0;
    double xi_one_over_e = 0.0;
    double phi_one_over_e_deg = 0.0;
    double edge_suppression = 0.0;  // 1 - (C-1)/(C(0)-1) at xi_max
    // longitudinal
    double bandwidth_ratio = 0.0;  // dw R_par / (hbar c)
};

ResolvabilityReport resolve_transverse(double r_perp_nm, double E, const TransparencyWindow& window = {},
                                       const Instrument& instrument = {}, const ResolveThresholds& thresholds = {});

ResolvabilityReport resolve_longitudinal(double delta_tau_fs, const Instrument& instrument,
                                         const ResolveThresholds& thresholds = {});

// Flat "key=value" lines, and the same content as a JSON object.
std::string to_key_value(const FitResult& fit);
std::string to_json(const FitResult& fit);
std::string to_key_value(const ResolvabilityReport& report);
std::string to_json(const ResolvabilityReport& report);

}  // namespace hbt
