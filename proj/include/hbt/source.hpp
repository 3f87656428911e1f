#pragma once

#include <string>

#include <Eigen/Core>

#include "hbt/spectrum.hpp"

namespace hbt {

// Space-time point (x, y, z in nm; t in fs).
using SpaceTimePoint = Eigen::Vector4d;

// Isotropic Gaussian emission region with a Gaussian flash profile.
// A zero width collapses that coordinate onto its center.
struct GaussianSource {
    double sigma_r_nm = 0.0;    // per-axis rms
    double delta_tau_fs = 0.0;  // rms flash duration
    double center_t_fs = 0.0;

    void validate() const;
};

enum class FlowProfile { none, linear_radial };

const char* to_string(FlowProfile profile);
FlowProfile flow_profile_from_string(const std::string& name);

// Radial expansion u(r) = v_over_c * (r / sigma_r) r_hat, entering the emission
// function through the first-order boost factor exp(E k_hat.u / T).
struct FlowBoost {
    FlowProfile profile = FlowProfile::none;
    double v_over_c = 0.0;
    double T_eV = 1.0;

    bool active() const { return profile != FlowProfile::none && v_over_c != 0.0; }
    void validate() const;
};

// S(x; K) = X(x) s(E) w(x; K_hat, E).
struct SourceModel {
    GaussianSource geometry;
    Spectrum spectrum = Spectrum::exponential(1.0);
    FlowBoost flow;

    void validate() const {
        geometry.validate();
        flow.validate();
    }
    std::string label() const;
};

// Normalized space-time density X(x). DomainError if a width is zero
// (the profile is then a distribution, not a function).
double spacetime_profile(const GaussianSource& source, const SpaceTimePoint& x);

// Flow weight w(x; K_hat, E); exactly 1 without flow.
double flow_weight(const GaussianSource& source, const FlowBoost& flow, const SpaceTimePoint& x,
                   const Eigen::Vector3d& k_hat, double E);

// Full emission function. k_hat defaults to the first axis.
double evaluate(const SourceModel& model, const SpaceTimePoint& x, double E,
                const Eigen::Vector3d& k_hat = Eigen::Vector3d::UnitX());

}  // namespace hbt
