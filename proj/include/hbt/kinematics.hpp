#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "hbt/errors.hpp"

namespace hbt {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

// Photon energy range over which the light can be measured (eV).
struct TransparencyWindow {
    double min = 1.5;
    double max = 6.0;

    bool contains(double omega) const { return omega >= min && omega <= max; }
};

template <typename Scalar>
struct PhotonMomentum {
    Scalar omega;                // eV, on shell: |k| = omega
    Vector3<Scalar> direction;   // unit vector

    Vector3<Scalar> momentum() const { return omega * direction; }
};

// Pair variables in the frame where K points along the first axis.
// q_perp and q_par are magnitudes; q0 keeps its sign.
template <typename Scalar>
struct PairKinematics {
    Scalar E;       // |k_a + k_b| / 2
    Scalar q0;      // omega_a - omega_b
    Scalar q_perp;
    Scalar q_par;
    Scalar phi;     // opening angle between the detectors
};

using PhotonMomentumd = PhotonMomentum<double>;
using PairKinematicsd = PairKinematics<double>;

namespace detail {

template <typename Scalar>
void require_photon(const PhotonMomentum<Scalar>& k) {
    using std::abs;
    if (!(k.omega > Scalar(0)) || !std::isfinite(static_cast<double>(k.omega)))
        throw DomainError("photon energy must be positive and finite");
    if (abs(k.direction.norm() - Scalar(1)) > Scalar(1e-12))
        throw DomainError("photon direction must be a unit vector");
}

}  // namespace detail

template <typename Scalar>
PhotonMomentum<Scalar> make_photon(Scalar omega, const Vector3<Scalar>& direction) {
    PhotonMomentum<Scalar> k{omega, direction.normalized()};
    detail::require_photon(k);
    return k;
}

// Closed-form pair variables for two detectors at opening angle phi.
template <typename Scalar>
PairKinematics<Scalar> pair_from_detector(Scalar omega_a, Scalar omega_b, Scalar phi) {
    using std::cos;
    using std::sqrt;
    using std::tan;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;

    if (!(omega_a > Scalar(0)) || !(omega_b > Scalar(0)) ||
        !std::isfinite(static_cast<double>(omega_a)) || !std::isfinite(static_cast<double>(omega_b)))
        throw DomainError("photon energies must be positive and finite");
    if (phi == pi && omega_a == omega_b)
        throw DegenerateGeometryError("back-to-back photons of equal energy have no pair direction");
    if (!(phi >= Scalar(0)) || !(phi < pi))
        throw DomainError("opening angle must lie in [0, pi)");

    const Scalar four_e2 = omega_a * omega_a + omega_b * omega_b + Scalar(2) * omega_a * omega_b * cos(phi);
    const Scalar E = sqrt(four_e2) / Scalar(2);
    const Scalar q0 = omega_a - omega_b;
    const Scalar q0_sq = q0 * q0;
    const Scalar tan_half = tan(phi / Scalar(2));
    const Scalar tan_half_sq = tan_half * tan_half;

    // 4E^2 + q0^4/4E^2 - 2 q0^2 == (4E^2 - q0^2)^2 / 4E^2
    const Scalar shrink = four_e2 - q0_sq;
    const Scalar q_perp = std::abs(shrink) / (Scalar(2) * E) * tan_half;
    const Scalar q_par_sq = q0_sq + (q0_sq - q0_sq * q0_sq / four_e2) * tan_half_sq;

    return {E, q0, q_perp, sqrt(q_par_sq), phi};
}

// Geometric construction from explicit 3-momenta; independent of the closed form.
template <typename Scalar>
PairKinematics<Scalar> pair_from_vectors(const PhotonMomentum<Scalar>& k_a, const PhotonMomentum<Scalar>& k_b) {
    using std::abs;
    using std::atan2;
    detail::require_photon(k_a);
    detail::require_photon(k_b);

    const Vector3<Scalar> K = (k_a.momentum() + k_b.momentum()) / Scalar(2);
    const Scalar E = K.norm();
    const Scalar scale = k_a.omega + k_b.omega;
    if (!(E > scale * Scalar(64) * std::numeric_limits<Scalar>::epsilon()))
        throw DegenerateGeometryError("pair momentum vanishes; longitudinal direction undefined");

    const Vector3<Scalar> K_hat = K / E;
    const Vector3<Scalar> q = k_a.momentum() - k_b.momentum();
    const Scalar q_par = abs(q.dot(K_hat));
    const Scalar q_perp = q.cross(K_hat).norm();
    const Scalar phi = atan2(k_a.direction.cross(k_b.direction).norm(), k_a.direction.dot(k_b.direction));
    return {E, k_a.omega - k_b.omega, q_perp, q_par, phi};
}

// Photon pair placed symmetrically about the first axis, so K points along it.
template <typename Scalar>
std::pair<PhotonMomentum<Scalar>, PhotonMomentum<Scalar>> detector_momenta(Scalar omega_a, Scalar omega_b,
                                                                            Scalar phi) {
    using std::cos;
    using std::sin;
    const Scalar c = cos(phi / Scalar(2));
    const Scalar s = sin(phi / Scalar(2));
    return {PhotonMomentum<Scalar>{omega_a, Vector3<Scalar>(c, s, Scalar(0))},
            PhotonMomentum<Scalar>{omega_b, Vector3<Scalar>(c, -s, Scalar(0))}};
}

// xi = 2 E tan(phi/2); equals q_perp at q0 = 0.
template <typename Scalar>
Scalar xi_variable(Scalar E, Scalar phi) {
    using std::tan;
    if (!(phi >= Scalar(0)) || !(phi < std::numbers::pi_v<Scalar>))
        throw DomainError("opening angle must lie in [0, pi)");
    return Scalar(2) * E * tan(phi / Scalar(2));
}

// Opening angle that realizes a given xi at pair energy E.
template <typename Scalar>
Scalar phi_from_xi(Scalar E, Scalar xi) {
    using std::atan;
    if (!(E > Scalar(0)) || !(xi >= Scalar(0))) throw DomainError("phi_from_xi needs E > 0 and xi >= 0");
    return Scalar(2) * atan(xi / (Scalar(2) * E));
}

// Energy of each photon in an equal-energy pair with pair energy E and opening angle phi.
template <typename Scalar>
Scalar equal_energy_photon(Scalar E, Scalar phi) {
    using std::cos;
    return E / cos(phi / Scalar(2));
}

// Largest xi reachable with equal-energy photons that stay inside the window.
inline double max_accessible_xi(double E, const TransparencyWindow& window = {}) {
    if (!(E < window.max))
        throw DomainError("pair energy at or above the window edge leaves no accessible opening angle");
    if (!(E > window.min)) throw DomainError("pair energy must lie inside the transparency window");
    // 2 E tan(phi_max/2) with cos(phi_max/2) = E / omega_max
    return 2.0 * std::sqrt((window.max - E) * (window.max + E));
}

// Relative mismatch of the common shortcut q0 ~ q_par. Zero at phi = 0.
template <typename Scalar>
Scalar q0_q_par_mismatch(const PairKinematics<Scalar>& k) {
    using std::abs;
    if (k.q_par == Scalar(0)) return Scalar(0);
    return (k.q_par - abs(k.q0)) / k.q_par;
}

}  // namespace hbt
