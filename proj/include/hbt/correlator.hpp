#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hbt/kinematics.hpp"
#include "hbt/moments.hpp"
#include "hbt/source.hpp"
#include "hbt/units.hpp"

namespace hbt {

// Fraction of photon pairs (equal helicities) that feel Bose symmetrization.
inline constexpr double kEqualHelicityFraction = 0.5;

// Above this value of |q| R / (hbar c) the quadrature path hands over to the
// analytic one instead of integrating an oscillation it cannot resolve.
inline constexpr double kMaxQuadraturePhase = 6.0;

enum class EvalPath { analytic, quadrature, monte_carlo };
enum class EnergyMode { on_shell_approx, exact_energies };
enum class ScanKind { transverse, longitudinal, intercept };

const char* to_string(EvalPath path);
const char* to_string(EnergyMode mode);
const char* to_string(ScanKind kind);
EnergyMode energy_mode_from_string(const std::string& name);
ScanKind scan_kind_from_string(const std::string& name);

struct CorrelatorPoint {
    PairKinematicsd kinematics{};
    double value = 1.0;
    double stat_error = 0.0;
    EvalPath path = EvalPath::analytic;
};

using KeyValueList = std::vector<std::pair<std::string, std::string>>;

// Sampled correlator curve. Abscissae: phi [rad] for transverse scans,
// q0 [eV] for longitudinal scans, flash duration [fs] for intercept curves.
struct ScanResult {
    ScanKind kind = ScanKind::transverse;
    double E = 0.0;  // eV
    std::vector<double> abscissae;
    std::vector<CorrelatorPoint> points;
    std::string source_label;
    KeyValueList metadata;  // provenance lines
    KeyValueList config;    // resolved run configuration

    std::size_t size() const { return points.size(); }
    // xi = 2 E tan(phi/2) of a transverse point.
    double xi(std::size_t i) const { return xi_variable(E, abscissae.at(i)); }
    // Throws DomainError when the kind/abscissa invariants do not hold.
    void validate() const;
};

struct ScanRequest {
    ScanKind kind = ScanKind::transverse;
    double E = 3.0;                             // eV
    std::vector<double> grid;                   // phi [rad] or q0 [eV]
    std::optional<TransparencyWindow> clip;     // drop points whose photons leave the window
};

// Transverse request from a xi grid [eV].
ScanRequest transverse_request_from_xi(double E, std::span<const double> xi_grid,
                                       std::optional<TransparencyWindow> clip = std::nullopt);

struct DetectorSetting {
    double abscissa;
    double omega_a;
    double omega_b;
    double phi;
};

// Photon energies and opening angle for every accessible grid point.
// DomainError if nothing survives the clipping.
std::vector<DetectorSetting> resolve_grid(const ScanRequest& request);

template <typename Scalar>
Scalar gaussian_correlator_value(Scalar r_perp_sq, Scalar r_par_sq, const PairKinematics<Scalar>& k,
                                 Scalar lambda = Scalar(kEqualHelicityFraction)) {
    using std::exp;
    constexpr Scalar hc = units::PhysicalConstants<Scalar>::hbar_c;
    const Scalar exponent = (r_perp_sq * k.q_perp * k.q_perp + r_par_sq * k.q_par * k.q_par) / (hc * hc);
    return Scalar(1) + lambda * exp(-exponent);
}

// 1 + lambda exp(-(R_perp^2 q_perp^2 + R_par^2 q_par^2) / (hbar c)^2)
CorrelatorPoint gaussian_correlator(const HbtRadii& radii, const PairKinematicsd& k,
                                    double lambda = kEqualHelicityFraction);

// Corrections that the Gaussian form needs to reproduce a given energy mode
// of the integral: none on shell, the curvature term dR_par^2 with exact energies.
RadiusCorrections mode_corrections(const Spectrum& spectrum, double E, EnergyMode mode);

// |int d^4x X w e^{iq.x}|^2 / (int d^4x X w)^2 for the source's space-time
// profile at the given emission energy and pair direction. q = (q0, q_vec) in eV.
double spacetime_form_factor(const SourceModel& model, const Eigen::Vector4d& q, const Eigen::Vector3d& k_hat,
                             double energy);

// Correlator from the Wigner-function integrals by tensor Gauss-Hermite
// quadrature (orders 16 -> 32 -> 64, 1e-7 relative on C).
CorrelatorPoint numeric_correlator(const SourceModel& model, const PhotonMomentumd& k_a,
                                   const PhotonMomentumd& k_b, EnergyMode mode,
                                   double lambda = kEqualHelicityFraction);

// Ratios exposing the off-shell pieces of the exact-energy integral:
// numerator amplitude at K0 over the one at E, and P1(w_a) P1(w_b) / P1(E)^2.
struct OffShellFactors {
    double amplitude_ratio;
    double denominator_ratio;
};
OffShellFactors off_shell_factors(const SourceModel& model, const PhotonMomentumd& k_a, const PhotonMomentumd& k_b);

// Analytic scan on given radii.
ScanResult scan(const HbtRadii& radii, const ScanRequest& request, double lambda = kEqualHelicityFraction);

// Quadrature scan on a source model.
ScanResult scan(const SourceModel& model, const ScanRequest& request, EnergyMode mode,
                double lambda = kEqualHelicityFraction, unsigned workers = 1);

struct McOptions {
    std::size_t n_pairs = 1'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;  // 0: hardware concurrency
    double lambda = kEqualHelicityFraction;
};

// Pair-weight Monte Carlo: emission points x, y drawn from the source, each
// pair contributing 1 + lambda cos(q.(x - y)). Independent deterministic
// stream per (grid point, chunk); identical output for any worker count.
ScanResult mc_correlator(const SourceModel& model, const ScanRequest& request, const McOptions& options);

}  // namespace hbt
