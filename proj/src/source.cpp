#include "hbt/source.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hbt/errors.hpp"

namespace hbt {

void GaussianSource::validate() const {
    if (!(sigma_r_nm >= 0.0) || !(delta_tau_fs >= 0.0) || !std::isfinite(sigma_r_nm) ||
        !std::isfinite(delta_tau_fs) || !std::isfinite(center_t_fs))
        throw DomainError("source widths must be finite and non-negative");
    if (sigma_r_nm == 0.0 && delta_tau_fs == 0.0)
        throw DomainError("source needs a non-zero spatial or temporal width");
}

const char* to_string(FlowProfile profile) {
    switch (profile) {
        case FlowProfile::none: return "none";
        case FlowProfile::linear_radial: return "linear_radial";
    }
    return "unknown";
}

FlowProfile flow_profile_from_string(const std::string& name) {
    if (name == "none") return FlowProfile::none;
    if (name == "linear_radial") return FlowProfile::linear_radial;
    throw DomainError("unknown flow profile '" + name + "'");
}

void FlowBoost::validate() const {
    if (!(v_over_c >= 0.0) || !(v_over_c < 1.0)) throw DomainError("flow velocity must satisfy 0 <= v/c < 1");
    if (profile != FlowProfile::none && !(T_eV > 0.0)) throw DomainError("flow temperature must be positive");
}

std::string SourceModel::label() const {
    std::ostringstream out;
    out << "gaussian(sigma_r=" << geometry.sigma_r_nm << " nm, delta_tau=" << geometry.delta_tau_fs << " fs) x "
        << spectrum.label();
    if (flow.profile != FlowProfile::none) out << " + " << to_string(flow.profile) << "(v/c=" << flow.v_over_c << ")";
    return out.str();
}

double spacetime_profile(const GaussianSource& source, const SpaceTimePoint& x) {
    source.validate();
    if (source.sigma_r_nm == 0.0 || source.delta_tau_fs == 0.0)
        throw DomainError("zero-width source has no pointwise density");
    const double s = source.sigma_r_nm;
    const double tau = source.delta_tau_fs;
    const double r2 = x.head<3>().squaredNorm() / (s * s);
    const double dt = (x[3] - source.center_t_fs) / tau;
    const double norm = std::pow(2.0 * std::numbers::pi, -2.0) / (s * s * s * tau);
    return norm * std::exp(-0.5 * (r2 + dt * dt));
}

double flow_weight(const GaussianSource& source, const FlowBoost& flow, const SpaceTimePoint& x,
                   const Eigen::Vector3d& k_hat, double E) {
    if (!flow.active() || source.sigma_r_nm == 0.0) return 1.0;
    // K.u ~ E (1 - k_hat.v), v = v_over_c * x / sigma_r
    const double k_dot_v = flow.v_over_c * k_hat.dot(x.head<3>()) / source.sigma_r_nm;
    return std::exp(E * k_dot_v / flow.T_eV);
}

double evaluate(const SourceModel& model, const SpaceTimePoint& x, double E, const Eigen::Vector3d& k_hat) {
    model.flow.validate();
    const double s = model.spectrum(E);
    return spacetime_profile(model.geometry, x) * s * flow_weight(model.geometry, model.flow, x, k_hat, E);
}

}  // namespace hbt
