#pragma once

#include <numbers>

// Unit system: energies in eV, lengths in nm, times in fs.
// Every exponent of the form q*R must be divided by hbar*c.
namespace hbt::units {

template <typename Scalar>
struct PhysicalConstants {
    // eV * nm
    static constexpr Scalar hbar_c = Scalar(197.3269804);
    // nm / fs
    static constexpr Scalar c = Scalar(299.792458);
    // 2*pi*hbar*c, the eV <-> nm conversion constant
    static constexpr Scalar two_pi_hbar_c = Scalar(2) * std::numbers::pi_v<Scalar> * hbar_c;
};

inline constexpr double hbar_c = PhysicalConstants<double>::hbar_c;
inline constexpr double c = PhysicalConstants<double>::c;
inline constexpr double two_pi_hbar_c = PhysicalConstants<double>::two_pi_hbar_c;

inline constexpr double fs_per_ps = 1000.0;
inline constexpr double eV_per_meV = 1e-3;
inline constexpr double deg_to_rad = std::numbers::pi / 180.0;
inline constexpr double rad_to_deg = 180.0 / std::numbers::pi;

// Photon energy (eV) for a vacuum wavelength (nm), and back.
template <typename Scalar>
constexpr Scalar energy_from_wavelength(Scalar lambda_nm) {
    return PhysicalConstants<Scalar>::two_pi_hbar_c / lambda_nm;
}

template <typename Scalar>
constexpr Scalar wavelength_from_energy(Scalar energy_eV) {
    return PhysicalConstants<Scalar>::two_pi_hbar_c / energy_eV;
}

// |d omega / d lambda| * d lambda at the given center wavelength.
template <typename Scalar>
constexpr Scalar energy_width_from_wavelength_width(Scalar lambda_nm, Scalar dlambda_nm) {
    return PhysicalConstants<Scalar>::two_pi_hbar_c / (lambda_nm * lambda_nm) * dlambda_nm;
}

// Length scale c*dt (nm) of a time dt (fs).
template <typename Scalar>
constexpr Scalar light_travel_nm(Scalar dt_fs) {
    return PhysicalConstants<Scalar>::c * dt_fs;
}

}  // namespace hbt::units
