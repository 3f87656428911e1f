#include <doctest.h>

#include <cmath>
#include <random>

#include "hbt/correlator.hpp"
#include "hbt/errors.hpp"

using namespace hbt;

namespace {

SourceModel gaussian_source(double sigma_nm, double tau_fs, Spectrum s = Spectrum::exponential(1.0)) {
    SourceModel m;
    m.geometry = {sigma_nm, tau_fs, 0.0};
    m.spectrum = std::move(s);
    return m;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

}  // namespace

TEST_CASE("gaussian correlator reference values") {
    const auto r10 = HbtRadii::from_radii(10.0, 0.0);
    CHECK(gaussian_correlator(r10, pair_from_detector(3.0, 3.0, 0.0)).value == 1.5);

    const double xi = max_accessible_xi(3.0);
    const double phi = phi_from_xi(3.0, xi);
    const double w = equal_energy_photon(3.0, phi);
    const auto edge = gaussian_correlator(r10, pair_from_detector(w, w, phi));
    // exp(-(10 * 6 sqrt 3 / hbar c)^2) = exp(-0.277...)
    CHECK(edge.value == doctest::Approx(1.0 + 0.5 * std::exp(-std::pow(10.0 * xi / units::hbar_c, 2))).epsilon(1e-14));
    CHECK(edge.value == doctest::Approx(1.378889).epsilon(1e-6));

    const auto rpar = HbtRadii::from_radii(0.0, units::light_travel_nm(1000.0));
    const double q0 = 0.6582e-3;
    const auto l = gaussian_correlator(rpar, pair_from_detector(3.0 + q0 / 2, 3.0 - q0 / 2, 0.0));
    CHECK(l.value == doctest::Approx(1.18394).epsilon(1e-5));
}

TEST_CASE("templated value in float") {
    const auto k = pair_from_detector(3.2f, 3.2f, 0.3f);
    const float v = gaussian_correlator_value(100.0f * 100.0f, 0.0f, k);
    const auto kd = pair_from_detector(3.2, 3.2, 0.3);
    CHECK(v == doctest::Approx(gaussian_correlator_value(1e4, 0.0, kd)).epsilon(1e-5));
}

TEST_CASE("quadrature reproduces the Gaussian form over a 20-point scan") {
    const auto m = gaussian_source(100.0, 0.0);
    const auto req = transverse_request_from_xi(3.0, linspace(0.0, max_accessible_xi(3.0), 20));
    const auto an = scan(compose_radii(variances(m, 3.0)), req);
    for (auto mode : {EnergyMode::on_shell_approx, EnergyMode::exact_energies}) {
        const auto q = scan(m, req, mode);
        REQUIRE(q.size() == 20);
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(q.points[i].path == EvalPath::quadrature);
            CHECK(std::abs(q.points[i].value - an.points[i].value) <= 1e-6);
        }
    }
}

TEST_CASE("longitudinal quadrature with a flash duration") {
    const auto m = gaussian_source(50.0, 200.0);
    ScanRequest req{ScanKind::longitudinal, 3.0, linspace(0.0, 2e-3, 20), std::nullopt};
    const auto an = scan(compose_radii(variances(m, 3.0)), req);
    for (auto mode : {EnergyMode::on_shell_approx, EnergyMode::exact_energies}) {
        const auto q = scan(m, req, mode);
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(q.points[i].path == EvalPath::quadrature);
            CHECK(std::abs(q.points[i].value - an.points[i].value) <= 1e-6);
        }
    }
}

TEST_CASE("identical photons give the full intercept") {
    const auto m = gaussian_source(100.0, 10.0);
    const auto [a, b] = detector_momenta(3.0, 3.0, 0.0);
    CHECK(numeric_correlator(m, a, b, EnergyMode::on_shell_approx).value == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(numeric_correlator(m, a, b, EnergyMode::exact_energies).value == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("off-shell pieces of the exact-energy integral") {
    // Exponential(T = 1 eV), E = 3 eV, sigma = 100 nm, q_perp = 2 eV.
    const auto m = gaussian_source(100.0, 0.0);
    const double phi = phi_from_xi(3.0, 2.0);
    const double w = equal_energy_photon(3.0, phi);
    const auto [a, b] = detector_momenta(w, w, phi);
    const double dr2 = correction_terms(m.spectrum, 3.0).delta_r_perp_sq;
    const double x = dr2 * 4.0 / (units::hbar_c * units::hbar_c);  // dR^2 q_perp^2 / (hbar c)^2

    const auto f = off_shell_factors(m, a, b);
    CHECK(std::abs(std::log(f.amplitude_ratio) / x - 1.0) < 0.2);
    CHECK(std::abs(std::log(f.denominator_ratio) / (2.0 * x) - 1.0) < 0.2);

    // squared amplitude factor over the denominator factor: no net shift
    const double on = numeric_correlator(m, a, b, EnergyMode::on_shell_approx).value;
    const double ex = numeric_correlator(m, a, b, EnergyMode::exact_energies).value;
    CHECK(std::abs(on - ex) < 1e-9);
    CHECK(f.amplitude_ratio * f.amplitude_ratio / f.denominator_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spectral curvature separates the two energy modes longitudinally") {
    const auto m = gaussian_source(100.0, 1.0, Spectrum::power_law(2.0));
    const auto [a, b] = detector_momenta(3.25, 2.75, 0.0);
    const double on = numeric_correlator(m, a, b, EnergyMode::on_shell_approx).value;
    const double ex = numeric_correlator(m, a, b, EnergyMode::exact_energies).value;
    const auto k = pair_from_detector(3.25, 2.75, 0.0);
    const auto matched = compose_radii(variances(m, 3.0), mode_corrections(m.spectrum, 3.0, EnergyMode::exact_energies));
    const double predicted = gaussian_correlator(matched, k).value;
    CHECK(ex > on);
    CHECK(std::abs((predicted - on) / (ex - on) - 1.0) < 0.2);
}

TEST_CASE("wide sources defer to the analytic path") {
    const auto m = gaussian_source(1000.0, 0.0);
    const double phi = phi_from_xi(3.0, 5.0);
    const double w = equal_energy_photon(3.0, phi);
    const auto [a, b] = detector_momenta(w, w, phi);
    const auto p = numeric_correlator(m, a, b, EnergyMode::on_shell_approx);
    CHECK(p.path == EvalPath::analytic);
    CHECK(p.value == doctest::Approx(1.0 + 0.5 * std::exp(-std::pow(1000.0 * 5.0 / units::hbar_c, 2))));
}

TEST_CASE("bounds and monotone fall-off along rays") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const auto radii = HbtRadii::from_radii(10.0 + 3000.0 * u(rng), 10.0 + 1e5 * u(rng));
        const double dir = u(rng) * std::numbers::pi / 2;
        double previous = 1.5;
        for (double s = 0.0; s < 1.0; s += 0.01) {
            PairKinematicsd k{3.0, 0.0, s * std::cos(dir), 1e-2 * s * std::sin(dir), 0.0};
            const double c = gaussian_correlator(radii, k).value;
            CHECK(c >= 1.0);
            CHECK(c <= 1.5);
            CHECK(c <= previous);
            previous = c;
        }
    }
}

TEST_CASE("scan grids") {
    const auto r = HbtRadii::from_radii(100.0, 100.0);
    ScanRequest one{ScanKind::transverse, 3.0, {0.2}, std::nullopt};
    CHECK(scan(r, one).size() == 1);

    ScanRequest descending{ScanKind::transverse, 3.0, {0.2, 0.1}, std::nullopt};
    CHECK_THROWS_AS(scan(r, descending), DomainError);

    ScanRequest outside{ScanKind::longitudinal, 1.4, {0.0, 1e-3}, TransparencyWindow{}};
    CHECK_THROWS_AS(scan(r, outside), DomainError);

    // clipping drops only the points whose photons leave the window
    const auto req = transverse_request_from_xi(3.0, linspace(0.0, 12.0, 13), TransparencyWindow{});
    const auto s = scan(r, req);
    CHECK(s.size() == 11);
    CHECK(s.xi(s.size() - 1) == doctest::Approx(10.0));

    const auto l = scan(r, ScanRequest{ScanKind::longitudinal, 3.0, linspace(0.0, 1e-2, 5), std::nullopt});
    for (const auto& p : l.points) CHECK(p.kinematics.phi == 0.0);
    const auto t = scan(r, req);
    for (const auto& p : t.points) CHECK(p.kinematics.q0 == 0.0);
}

TEST_CASE("Monte Carlo intercept and statistical contract") {
    const auto m = gaussian_source(100.0, 0.0);
    const auto req = transverse_request_from_xi(3.0, linspace(0.0, 4.0, 5));
    const auto mc = mc_correlator(m, req, {20'000, 5, 1, 0.5});
    CHECK(mc.points[0].value == 1.5);
    CHECK(mc.points[0].stat_error == 0.0);
    const auto an = scan(compose_radii(variances(m, 3.0)), req);
    for (std::size_t i = 1; i < mc.size(); ++i) {
        CHECK(mc.points[i].path == EvalPath::monte_carlo);
        CHECK(mc.points[i].stat_error > 0.0);
        CHECK(std::abs(mc.points[i].value - an.points[i].value) < 5.0 * mc.points[i].stat_error);
    }

    // the error shrinks like 1/sqrt(n)
    const auto big = mc_correlator(m, req, {320'000, 5, 1, 0.5});
    CHECK(big.points[2].stat_error == doctest::Approx(mc.points[2].stat_error / 4.0).epsilon(0.05));

    CHECK_THROWS_AS(mc_correlator(m, req, {9'999, 5, 1, 0.5}), DomainError);
}

TEST_CASE("Monte Carlo determinism across runs and worker counts") {
    const auto m = gaussian_source(100.0, 20.0);
    const auto req = transverse_request_from_xi(3.0, linspace(0.0, 6.0, 7));
    const auto a = mc_correlator(m, req, {50'000, 123, 1, 0.5});
    const auto b = mc_correlator(m, req, {50'000, 123, 1, 0.5});
    const auto c = mc_correlator(m, req, {50'000, 123, 3, 0.5});
    const auto d = mc_correlator(m, req, {50'000, 124, 1, 0.5});
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i].value == b.points[i].value);
        CHECK(a.points[i].value == c.points[i].value);
        CHECK(a.points[i].stat_error == c.points[i].stat_error);
        differs = differs || a.points[i].value != d.points[i].value;
    }
    CHECK(differs);
}

TEST_CASE("slow radial flow leaves the correlator unchanged") {
    auto m = gaussian_source(100.0, 10.0);
    const double phi = phi_from_xi(3.0, 2.0);
    const double w = equal_energy_photon(3.0, phi);
    const auto [a, b] = detector_momenta(w, w, phi);
    const double still = numeric_correlator(m, a, b, EnergyMode::on_shell_approx).value;
    m.flow = {FlowProfile::linear_radial, 1e-4, 1.0};
    const double moving = numeric_correlator(m, a, b, EnergyMode::on_shell_approx).value;
    CHECK(std::abs(moving - still) < 1e-9);
}

TEST_CASE("enum names") {
    CHECK(energy_mode_from_string(to_string(EnergyMode::exact_energies)) == EnergyMode::exact_energies);
    CHECK(scan_kind_from_string(to_string(ScanKind::longitudinal)) == ScanKind::longitudinal);
    CHECK_THROWS_AS(scan_kind_from_string("diagonal"), DomainError);
}
