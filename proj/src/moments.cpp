#include "hbt/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hbt/detail/tensor_quadrature.hpp"
#include "hbt/errors.hpp"
#include "hbt/units.hpp"

namespace hbt {

namespace {

constexpr double kMomentTolerance = 1e-7;

SpaceTimeVariances analytic_variances(const GaussianSource& g) {
    const double s2 = g.sigma_r_nm * g.sigma_r_nm;
    return {s2, s2, g.delta_tau_fs * g.delta_tau_fs, 0.0, 0.0};
}

SpaceTimeVariances quadrature_variances(const SourceModel& model, double E, int order) {
    const Eigen::Vector3d k_hat = Eigen::Vector3d::UnitX();
    double s0 = 0.0, s_par = 0.0, s_t = 0.0, s_perp = 0.0;
    double s_par2 = 0.0, s_perp2 = 0.0, s_t2 = 0.0, s_par_t = 0.0;
    detail::for_each_spacetime_node(model.geometry, order, [&](const SpaceTimePoint& x, double w) {
        const double weight = w * flow_weight(model.geometry, model.flow, x, k_hat, E);
        const double t = x[3] - model.geometry.center_t_fs;
        s0 += weight;
        s_par += weight * x[0];
        s_perp += weight * x[1];
        s_t += weight * t;
        s_par2 += weight * x[0] * x[0];
        s_perp2 += weight * x[1] * x[1];
        s_t2 += weight * t * t;
        s_par_t += weight * x[0] * t;
    });
    const double m_par = s_par / s0;
    const double m_perp = s_perp / s0;
    const double m_t = s_t / s0;
    SpaceTimeVariances v;
    v.mean_x_par = m_par;
    v.var_x_par = s_par2 / s0 - m_par * m_par;
    v.var_x_perp = s_perp2 / s0 - m_perp * m_perp;
    v.var_t = s_t2 / s0 - m_t * m_t;
    v.cross_x_par_t = s_par_t / s0 - m_par * m_t;
    return v;
}

double moment_mismatch(const SpaceTimeVariances& a, const SpaceTimeVariances& b, const GaussianSource& g) {
    const double tiny = 1e-300;
    const double sx = std::max(g.sigma_r_nm * g.sigma_r_nm, tiny);
    const double st = std::max(g.delta_tau_fs * g.delta_tau_fs, tiny);
    return std::max({std::abs(a.var_x_par - b.var_x_par) / sx, std::abs(a.var_x_perp - b.var_x_perp) / sx,
                     std::abs(a.var_t - b.var_t) / st,
                     std::abs(a.cross_x_par_t - b.cross_x_par_t) / std::sqrt(sx * st),
                     std::abs(a.mean_x_par - b.mean_x_par) / std::sqrt(sx)});
}

}  // namespace

SpaceTimeVariances variances(const SourceModel& model, double E, MomentPath path) {
    model.validate();
    (void)model.spectrum(E);  // domain check

    if (path == MomentPath::automatic)
        path = model.flow.active() ? MomentPath::quadrature : MomentPath::analytic;
    if (path == MomentPath::analytic) {
        if (model.flow.active()) throw DomainError("analytic moments exist only for flow-free sources");
        return analytic_variances(model.geometry);
    }

    const auto& orders = quadrature_escalation();
    SpaceTimeVariances previous = quadrature_variances(model, E, orders.front());
    double mismatch = 0.0;
    for (std::size_t i = 1; i < orders.size(); ++i) {
        SpaceTimeVariances current = quadrature_variances(model, E, orders[i]);
        mismatch = moment_mismatch(previous, current, model.geometry);
        if (mismatch <= kMomentTolerance) return current;
        previous = current;
    }
    std::ostringstream msg;
    msg << "space-time moments did not converge: relative change " << mismatch << " at Gauss-Hermite order "
        << orders.back();
    throw NumericalError(msg.str());
}

RadiusCorrections correction_terms(const Spectrum& spectrum, double E) {
    const LogDerivatives d = spectrum_log_derivs(spectrum, E);
    const double hc2 = units::hbar_c * units::hbar_c;
    return {hc2 / (8.0 * E) * d.first, hc2 / 4.0 * d.second};
}

HbtRadii compose_radii(const SpaceTimeVariances& v, const RadiusCorrections& corrections, bool include_cross_term) {
    if (v.var_x_perp < 0.0 || v.var_x_par < 0.0 || v.var_t < 0.0)
        throw DomainError("variances must be non-negative");

    HbtRadii r;
    r.delta_r_perp_sq = corrections.delta_r_perp_sq;
    r.delta_r_par_sq = corrections.delta_r_par_sq;
    r.r_perp_sq = v.var_x_perp + corrections.delta_r_perp_sq;
    r.r_par_sq = v.var_x_par + units::c * units::c * v.var_t + corrections.delta_r_par_sq;
    if (include_cross_term) r.r_par_sq -= 2.0 * units::c * v.cross_x_par_t;

    // A zero geometric width is allowed; a correction that drives a square
    // to or below zero is not.
    const bool perp_bad = r.r_perp_sq < 0.0 || (corrections.delta_r_perp_sq != 0.0 && !(r.r_perp_sq > 0.0));
    const bool par_bad = r.r_par_sq < 0.0 || (corrections.delta_r_par_sq != 0.0 && !(r.r_par_sq > 0.0));
    if (perp_bad || par_bad) {
        std::ostringstream msg;
        msg << "approximation breakdown: corrections overwhelm the geometric radii (R_perp^2 = " << r.r_perp_sq
            << " nm^2, R_par^2 = " << r.r_par_sq << " nm^2)";
        throw ApproximationBreakdownError(msg.str());
    }
    return r;
}

}  // namespace hbt
