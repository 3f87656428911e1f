#pragma once

#include <cmath>

#include "hbt/source.hpp"
#include "hbt/spectrum.hpp"

namespace hbt {

// Second central space-time moments of S(x; E) in the pair frame
// (x_par along K_hat). Lengths in nm, times in fs.
struct SpaceTimeVariances {
    double var_x_perp = 0.0;
    double var_x_par = 0.0;
    double var_t = 0.0;
    double cross_x_par_t = 0.0;
    double mean_x_par = 0.0;  // diagnostic only; cancels in the radii
};

struct RadiusCorrections {
    double delta_r_perp_sq = 0.0;  // nm^2
    double delta_r_par_sq = 0.0;   // nm^2
};

struct HbtRadii {
    double r_perp_sq = 0.0;
    double r_par_sq = 0.0;
    double delta_r_perp_sq = 0.0;
    double delta_r_par_sq = 0.0;

    double r_perp() const { return std::sqrt(r_perp_sq); }
    double r_par() const { return std::sqrt(r_par_sq); }

    // Radii given directly, without corrections.
    static HbtRadii from_radii(double r_perp_nm, double r_par_nm) {
        return {r_perp_nm * r_perp_nm, r_par_nm * r_par_nm, 0.0, 0.0};
    }
};

enum class MomentPath { automatic, analytic, quadrature };

// Analytic for flow-free sources, escalating tensor Gauss-Hermite otherwise.
// NumericalError if successive orders disagree by more than 1e-7 relative.
SpaceTimeVariances variances(const SourceModel& model, double E, MomentPath path = MomentPath::automatic);

// (hbar c)^2 / (8E) * dln s/dE  and  (hbar c)^2 / 4 * d^2 ln s/dE^2.
RadiusCorrections correction_terms(const Spectrum& spectrum, double E);

// R_perp^2 = <x_perp^2> + dR_perp^2
// R_par^2  = <x_par^2> + c^2 <t^2> [- 2c <x_par t>] + dR_par^2
// ApproximationBreakdownError if a correction drives either square to <= 0.
HbtRadii compose_radii(const SpaceTimeVariances& v, const RadiusCorrections& corrections = {},
                       bool include_cross_term = false);

}  // namespace hbt
