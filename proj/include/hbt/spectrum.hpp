#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hbt {

struct EnergyInterval {
    double min = 0.1;   // eV
    double max = 20.0;  // eV

    bool contains(double E) const { return E >= min && E <= max; }
};

enum class SpectrumKind { exponential, power_law, blackbody, tabulated };

const char* to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);

// Single-photon energy spectrum s(E), up to normalization.
//
//   exponential  s = exp(-E/T)
//   power_law    s = E^alpha
//   blackbody    s = E^2 / (exp(E/T) - 1)      photon number per unit energy
//   tabulated    natural cubic spline through ln(intensity); no extrapolation
class Spectrum {
public:
    static Spectrum exponential(double T_eV, EnergyInterval domain = {});
    static Spectrum power_law(double alpha, EnergyInterval domain = {});
    static Spectrum blackbody(double T_eV, EnergyInterval domain = {});
    static Spectrum tabulated(std::vector<double> energies_eV, std::vector<double> intensities);

    // Two whitespace- or comma-separated columns (E_eV, intensity); '#' starts a comment.
    static Spectrum read_table(std::istream& in);
    static Spectrum read_table(const std::filesystem::path& path);

    SpectrumKind kind() const { return kind_; }
    const EnergyInterval& domain() const { return domain_; }
    double temperature() const { return param_; }  // exponential, blackbody
    double alpha() const { return param_; }        // power_law

    // s(E); DomainError outside the domain.
    double operator()(double E) const;
    double log_value(double E) const;

    std::string label() const;

    // Tabulated data; empty for closed-form kinds.
    const std::vector<double>& table_energies() const { return energies_; }
    const std::vector<double>& table_log_values() const { return log_values_; }

private:
    Spectrum() = default;
    double spline_log(double E) const;

    SpectrumKind kind_ = SpectrumKind::exponential;
    EnergyInterval domain_;
    double param_ = 1.0;
    std::vector<double> energies_;
    std::vector<double> log_values_;
    std::vector<double> log_curvature_;  // spline second derivatives at the knots
};

struct LogDerivatives {
    double first;   // d ln s / dE    [1/eV]
    double second;  // d^2 ln s / dE^2 [1/eV^2]
};

// Relative finite-difference step used for tabulated spectra.
inline constexpr double kLogDerivativeRelativeStep = 1e-3;

// Analytic for closed-form kinds, second-order central differences on the
// spline for tabulated ones. Requires E +- 2h inside the domain, h = 1e-3 E.
LogDerivatives spectrum_log_derivs(const Spectrum& spectrum, double E);

// Central-difference derivatives of ln s, whatever the kind. Used as an oracle.
LogDerivatives finite_difference_log_derivs(const Spectrum& spectrum, double E, double h);

}  // namespace hbt
