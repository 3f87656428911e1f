#include "hbt/correlator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "hbt/errors.hpp"
#include "hbt/parallel.hpp"
#include "hbt/quadrature.hpp"

namespace hbt {

const char* to_string(EvalPath path) {
    switch (path) {
        case EvalPath::analytic: return "analytic";
        case EvalPath::quadrature: return "quadrature";
        case EvalPath::monte_carlo: return "mc";
    }
    return "unknown";
}

const char* to_string(EnergyMode mode) {
    switch (mode) {
        case EnergyMode::on_shell_approx: return "on_shell";
        case EnergyMode::exact_energies: return "exact";
    }
    return "unknown";
}

const char* to_string(ScanKind kind) {
    switch (kind) {
        case ScanKind::transverse: return "transverse";
        case ScanKind::longitudinal: return "longitudinal";
        case ScanKind::intercept: return "intercept";
    }
    return "unknown";
}

EnergyMode energy_mode_from_string(const std::string& name) {
    if (name == "on_shell" || name == "on_shell_approx") return EnergyMode::on_shell_approx;
    if (name == "exact" || name == "exact_energies") return EnergyMode::exact_energies;
    throw DomainError("unknown energy mode '" + name + "'");
}

ScanKind scan_kind_from_string(const std::string& name) {
    if (name == "transverse") return ScanKind::transverse;
    if (name == "longitudinal") return ScanKind::longitudinal;
    if (name == "intercept") return ScanKind::intercept;
    throw DomainError("unknown scan kind '" + name + "'");
}

void ScanResult::validate() const {
    if (abscissae.size() != points.size()) throw DomainError("scan abscissae and points differ in length");
    for (std::size_t i = 1; i < abscissae.size(); ++i)
        if (!(abscissae[i] > abscissae[i - 1])) throw DomainError("scan abscissae must be strictly increasing");
    for (const auto& p : points) {
        if (kind == ScanKind::transverse && p.kinematics.q0 != 0.0)
            throw DomainError("transverse scan point with non-zero q0");
        if (kind == ScanKind::longitudinal && p.kinematics.phi != 0.0)
            throw DomainError("longitudinal scan point with non-zero opening angle");
    }
}

ScanRequest transverse_request_from_xi(double E, std::span<const double> xi_grid,
                                       std::optional<TransparencyWindow> clip) {
    ScanRequest request;
    request.kind = ScanKind::transverse;
    request.E = E;
    request.clip = clip;
    request.grid.reserve(xi_grid.size());
    for (double xi : xi_grid) request.grid.push_back(phi_from_xi(E, xi));
    return request;
}

std::vector<DetectorSetting> resolve_grid(const ScanRequest& request) {
    if (!(request.E > 0.0)) throw DomainError("scan energy must be positive");
    if (request.kind == ScanKind::intercept) throw DomainError("intercept curves are not detector scans");
    for (std::size_t i = 1; i < request.grid.size(); ++i)
        if (!(request.grid[i] > request.grid[i - 1])) throw DomainError("scan grid must be strictly increasing");

    constexpr double edge_slack = 1e-12;
    auto inside = [&](double omega) {
        if (!request.clip) return true;
        return omega >= request.clip->min * (1.0 - edge_slack) && omega <= request.clip->max * (1.0 + edge_slack);
    };

    std::vector<DetectorSetting> out;
    out.reserve(request.grid.size());
    for (double a : request.grid) {
        if (request.kind == ScanKind::transverse) {
            if (!(a >= 0.0) || !(a < std::numbers::pi)) throw DomainError("opening angle must lie in [0, pi)");
            const double omega = equal_energy_photon(request.E, a);
            if (inside(omega)) out.push_back({a, omega, omega, a});
        } else {
            const double omega_a = request.E + 0.5 * a;
            const double omega_b = request.E - 0.5 * a;
            if (omega_b > 0.0 && inside(omega_a) && inside(omega_b)) out.push_back({a, omega_a, omega_b, 0.0});
        }
    }
    if (out.empty()) throw DomainError("no accessible grid points after window clipping");
    return out;
}

CorrelatorPoint gaussian_correlator(const HbtRadii& radii, const PairKinematicsd& k, double lambda) {
    return {k, gaussian_correlator_value(radii.r_perp_sq, radii.r_par_sq, k, lambda), 0.0, EvalPath::analytic};
}

RadiusCorrections mode_corrections(const Spectrum& spectrum, double E, EnergyMode mode) {
    if (mode == EnergyMode::on_shell_approx) return {};
    // The off-shell factor of the numerator amplitude enters squared and cancels
    // the transverse part of P1(w_a) P1(w_b); only the curvature term survives.
    return {0.0, correction_terms(spectrum, E).delta_r_par_sq};
}

namespace {

using Complex = std::complex<double>;

// int d^4x X(x) w(x) e^{i(q0 c t - q.x)/hbar c} on the order^4 Gauss-Hermite grid.
Complex spacetime_amplitude(const SourceModel& model, const Eigen::Vector4d& q, const Eigen::Vector3d& k_hat,
                            double energy, int order) {
    const auto& rule = gauss_hermite_rule(order);
    const int n = rule.order();
    const GaussianSource& g = model.geometry;
    const double inv_hc = 1.0 / units::hbar_c;

    // Per-axis phase tables; axis 0 is time.
    std::array<std::vector<Complex>, 4> phase;
    for (auto& p : phase) p.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = rule.nodes[i];
        const double t = g.center_t_fs + g.delta_tau_fs * u;
        phase[0][i] = std::polar(1.0, q[0] * units::c * t * inv_hc);
        for (int axis = 1; axis < 4; ++axis) phase[axis][i] = std::polar(1.0, -q[axis] * g.sigma_r_nm * u * inv_hc);
    }

    if (!model.flow.active()) {
        // Flat weight: the tensor sum separates into a product of axis sums.
        Complex total(1.0, 0.0);
        for (const auto& p : phase) {
            Complex axis_sum(0.0, 0.0);
            for (int i = 0; i < n; ++i) axis_sum += rule.weights[i] * p[i];
            total *= axis_sum;
        }
        return total;
    }

    Complex total(0.0, 0.0);
    SpaceTimePoint x;
    for (int it = 0; it < n; ++it) {
        x[3] = g.center_t_fs + g.delta_tau_fs * rule.nodes[it];
        const Complex pt = rule.weights[it] * phase[0][it];
        for (int i = 0; i < n; ++i) {
            x[0] = g.sigma_r_nm * rule.nodes[i];
            const Complex pi = pt * (rule.weights[i] * phase[1][i]);
            for (int j = 0; j < n; ++j) {
                x[1] = g.sigma_r_nm * rule.nodes[j];
                const Complex pj = pi * (rule.weights[j] * phase[2][j]);
                Complex row(0.0, 0.0);
                for (int k = 0; k < n; ++k) {
                    x[2] = g.sigma_r_nm * rule.nodes[k];
                    row += (rule.weights[k] * flow_weight(g, model.flow, x, k_hat, energy)) * phase[3][k];
                }
                total += pj * row;
            }
        }
    }
    return total;
}

double spatial_phase_scale(const GaussianSource& g, const Eigen::Vector4d& q) {
    const double spatial = q.tail<3>().squaredNorm() * g.sigma_r_nm * g.sigma_r_nm;
    const double temporal = q[0] * q[0] * units::c * units::c * g.delta_tau_fs * g.delta_tau_fs;
    return std::sqrt(spatial + temporal) / units::hbar_c;
}

struct PairGeometry {
    PairKinematicsd kin;
    Eigen::Vector4d q;
    Eigen::Vector3d K_hat;
    double K0;
};

PairGeometry pair_geometry(const PhotonMomentumd& k_a, const PhotonMomentumd& k_b) {
    PairGeometry pg;
    pg.kin = pair_from_vectors(k_a, k_b);
    pg.q[0] = k_a.omega - k_b.omega;
    pg.q.tail<3>() = k_a.momentum() - k_b.momentum();
    pg.K_hat = (k_a.momentum() + k_b.momentum()).normalized();
    pg.K0 = 0.5 * (k_a.omega + k_b.omega);
    return pg;
}

double correlator_ratio(const SourceModel& model, const PhotonMomentumd& k_a, const PhotonMomentumd& k_b,
                        const PairGeometry& pg, EnergyMode mode, int order) {
    const Eigen::Vector4d zero = Eigen::Vector4d::Zero();
    if (mode == EnergyMode::on_shell_approx) {
        const double E = pg.kin.E;
        const double norm = spacetime_amplitude(model, zero, pg.K_hat, E, order).real();
        return std::norm(spacetime_amplitude(model, pg.q, pg.K_hat, E, order)) / (norm * norm);
    }
    const Spectrum& s = model.spectrum;
    const double log_spec = 2.0 * s.log_value(pg.K0) - s.log_value(k_a.omega) - s.log_value(k_b.omega);
    const double na = spacetime_amplitude(model, zero, k_a.direction, k_a.omega, order).real();
    const double nb = spacetime_amplitude(model, zero, k_b.direction, k_b.omega, order).real();
    return std::exp(log_spec) * std::norm(spacetime_amplitude(model, pg.q, pg.K_hat, pg.K0, order)) / (na * nb);
}

}  // namespace

double spacetime_form_factor(const SourceModel& model, const Eigen::Vector4d& q, const Eigen::Vector3d& k_hat,
                             double energy) {
    const GaussianSource& g = model.geometry;
    g.validate();
    if (!model.flow.active()) {
        const double hc2 = units::hbar_c * units::hbar_c;
        const double spatial = q.tail<3>().squaredNorm() * g.sigma_r_nm * g.sigma_r_nm;
        const double temporal = q[0] * q[0] * units::c * units::c * g.delta_tau_fs * g.delta_tau_fs;
        return std::exp(-(spatial + temporal) / hc2);
    }
    const Eigen::Vector4d zero = Eigen::Vector4d::Zero();
    const auto& orders = quadrature_escalation();
    double previous = 0.0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const double norm = spacetime_amplitude(model, zero, k_hat, energy, orders[i]).real();
        const double value = std::norm(spacetime_amplitude(model, q, k_hat, energy, orders[i])) / (norm * norm);
        if (i > 0 && std::abs(value - previous) <= 1e-7) return value;
        previous = value;
    }
    throw NumericalError("space-time form factor did not converge");
}

CorrelatorPoint numeric_correlator(const SourceModel& model, const PhotonMomentumd& k_a, const PhotonMomentumd& k_b,
                                   EnergyMode mode, double lambda) {
    model.validate();
    const PairGeometry pg = pair_geometry(k_a, k_b);
    // Domain checks on every energy the integrals touch.
    (void)model.spectrum(k_a.omega);
    (void)model.spectrum(k_b.omega);
    if (mode == EnergyMode::on_shell_approx) (void)model.spectrum(pg.kin.E);

    if (spatial_phase_scale(model.geometry, pg.q) > kMaxQuadraturePhase) {
        const HbtRadii radii =
            compose_radii(variances(model, pg.kin.E), mode_corrections(model.spectrum, pg.kin.E, mode));
        return gaussian_correlator(radii, pg.kin, lambda);
    }

    const auto& orders = quadrature_escalation();
    double previous = 0.0;
    double change = 0.0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const double value = 1.0 + lambda * correlator_ratio(model, k_a, k_b, pg, mode, orders[i]);
        if (i > 0) {
            change = std::abs(value - previous) / std::abs(value);
            if (change <= 1e-7) return {pg.kin, value, 0.0, EvalPath::quadrature};
        }
        previous = value;
    }
    std::ostringstream msg;
    msg << "correlator quadrature did not converge (relative change " << change << " at order " << orders.back()
        << ")";
    throw NumericalError(msg.str());
}

OffShellFactors off_shell_factors(const SourceModel& model, const PhotonMomentumd& k_a, const PhotonMomentumd& k_b) {
    model.validate();
    const PairGeometry pg = pair_geometry(k_a, k_b);
    const Spectrum& s = model.spectrum;
    const double E = pg.kin.E;
    constexpr int order = 32;
    const Eigen::Vector4d zero = Eigen::Vector4d::Zero();

    const double amp_off = std::abs(spacetime_amplitude(model, pg.q, pg.K_hat, pg.K0, order));
    const double amp_on = std::abs(spacetime_amplitude(model, pg.q, pg.K_hat, E, order));
    const double p_a = spacetime_amplitude(model, zero, k_a.direction, k_a.omega, order).real();
    const double p_b = spacetime_amplitude(model, zero, k_b.direction, k_b.omega, order).real();
    const double p_e = spacetime_amplitude(model, zero, pg.K_hat, E, order).real();

    OffShellFactors f;
    f.amplitude_ratio = std::exp(s.log_value(pg.K0) - s.log_value(E)) * amp_off / amp_on;
    f.denominator_ratio =
        std::exp(s.log_value(k_a.omega) + s.log_value(k_b.omega) - 2.0 * s.log_value(E)) * p_a * p_b / (p_e * p_e);
    return f;
}

namespace {

ScanResult empty_scan(const ScanRequest& request, std::string label) {
    ScanResult result;
    result.kind = request.kind;
    result.E = request.E;
    result.source_label = std::move(label);
    return result;
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

ScanResult scan(const HbtRadii& radii, const ScanRequest& request, double lambda) {
    const auto settings = resolve_grid(request);
    std::ostringstream label;
    label << "gaussian(R_perp=" << radii.r_perp() << " nm, R_par=" << radii.r_par() << " nm)";
    ScanResult result = empty_scan(request, label.str());
    for (const auto& s : settings) {
        result.abscissae.push_back(s.abscissa);
        result.points.push_back(gaussian_correlator(radii, pair_from_detector(s.omega_a, s.omega_b, s.phi), lambda));
    }
    result.metadata = {{"engine", "analytic"}, {"lambda", format_double(lambda)}};
    return result;
}

ScanResult scan(const SourceModel& model, const ScanRequest& request, EnergyMode mode, double lambda,
                unsigned workers) {
    const auto settings = resolve_grid(request);
    ScanResult result = empty_scan(request, model.label());
    result.points.resize(settings.size());
    parallel_for(settings.size(), workers, [&](std::size_t i) {
        const auto& s = settings[i];
        const auto [k_a, k_b] = detector_momenta(s.omega_a, s.omega_b, s.phi);
        CorrelatorPoint p = numeric_correlator(model, k_a, k_b, mode, lambda);
        // Report the closed-form kinematics so scan invariants hold exactly.
        p.kinematics = pair_from_detector(s.omega_a, s.omega_b, s.phi);
        result.points[i] = p;
    });
    for (const auto& s : settings) result.abscissae.push_back(s.abscissa);
    result.metadata = {{"engine", "quadrature"}, {"energy_mode", to_string(mode)}, {"lambda", format_double(lambda)}};
    return result;
}

namespace {

constexpr std::size_t kPairsPerChunk = 1u << 14;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t master, std::size_t point, std::size_t chunk) {
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(point)) ^
                      static_cast<std::uint64_t>(chunk));
}

// Weighted sums of u = v - 1 for one chunk.
struct ChunkSums {
    double sw = 0.0, swu = 0.0, sw2 = 0.0, sw2u = 0.0, sw2u2 = 0.0;
    std::size_t n = 0;
};

ChunkSums run_chunk(const SourceModel& model, const DetectorSetting& setting, std::size_t n_pairs,
                    std::uint64_t seed, double lambda) {
    const auto [k_a, k_b] = detector_momenta(setting.omega_a, setting.omega_b, setting.phi);
    const Eigen::Vector3d q = k_a.momentum() - k_b.momentum();
    const double q0 = k_a.omega - k_b.omega;
    const Eigen::Vector3d K = k_a.momentum() + k_b.momentum();
    const Eigen::Vector3d K_hat = K.normalized();
    const double E = 0.5 * K.norm();
    const GaussianSource& g = model.geometry;
    const bool weighted = model.flow.active();
    const double inv_hc = 1.0 / units::hbar_c;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ChunkSums sums;
    SpaceTimePoint x;
    SpaceTimePoint y;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        for (int a = 0; a < 3; ++a) x[a] = g.sigma_r_nm * normal(rng);
        x[3] = g.center_t_fs + g.delta_tau_fs * normal(rng);
        for (int a = 0; a < 3; ++a) y[a] = g.sigma_r_nm * normal(rng);
        y[3] = g.center_t_fs + g.delta_tau_fs * normal(rng);

        const SpaceTimePoint d = x - y;
        const double phase = (q0 * units::c * d[3] - q.dot(d.head<3>())) * inv_hc;
        const double u = lambda * std::cos(phase);
        const double w = weighted ? flow_weight(g, model.flow, x, K_hat, E) * flow_weight(g, model.flow, y, K_hat, E)
                                  : 1.0;
        sums.sw += w;
        sums.swu += w * u;
        sums.sw2 += w * w;
        sums.sw2u += w * w * u;
        sums.sw2u2 += w * w * u * u;
    }
    sums.n = n_pairs;
    return sums;
}

}  // namespace

ScanResult mc_correlator(const SourceModel& model, const ScanRequest& request, const McOptions& options) {
    model.validate();
    if (options.n_pairs < 10'000) throw DomainError("Monte Carlo needs at least 1e4 pairs per point");
    const auto settings = resolve_grid(request);
    const std::size_t n_chunks = (options.n_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
    const std::size_t n_tasks = settings.size() * n_chunks;

    std::vector<ChunkSums> partial(n_tasks);
    parallel_for(n_tasks, options.workers, [&](std::size_t task) {
        const std::size_t point = task / n_chunks;
        const std::size_t chunk = task % n_chunks;
        const std::size_t begin = chunk * kPairsPerChunk;
        const std::size_t count = std::min(kPairsPerChunk, options.n_pairs - begin);
        partial[task] = run_chunk(model, settings[point], count, chunk_seed(options.seed, point, chunk), options.lambda);
    });

    ScanResult result = empty_scan(request, model.label());
    for (std::size_t p = 0; p < settings.size(); ++p) {
        ChunkSums total;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            const ChunkSums& s = partial[p * n_chunks + c];
            total.sw += s.sw;
            total.swu += s.swu;
            total.sw2 += s.sw2;
            total.sw2u += s.sw2u;
            total.sw2u2 += s.sw2u2;
            total.n += s.n;
        }
        const double mean = total.swu / total.sw;
        const double dev2 = std::max(0.0, total.sw2u2 - 2.0 * mean * total.sw2u + mean * mean * total.sw2);
        const double n = static_cast<double>(total.n);
        const double stat_error = std::sqrt(dev2 * n / (n - 1.0)) / total.sw;

        const auto& s = settings[p];
        result.abscissae.push_back(s.abscissa);
        result.points.push_back(
            {pair_from_detector(s.omega_a, s.omega_b, s.phi), 1.0 + mean, stat_error, EvalPath::monte_carlo});
    }
    result.metadata = {{"engine", "mc"},
                       {"n_pairs", std::to_string(options.n_pairs)},
                       {"seed", std::to_string(options.seed)},
                       {"lambda", format_double(options.lambda)}};
    return result;
}

}  // namespace hbt
