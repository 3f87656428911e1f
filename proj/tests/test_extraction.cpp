#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hbt/errors.hpp"
#include "hbt/extraction.hpp"
#include "hbt/filter.hpp"

using namespace hbt;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

ScanResult transverse_scan(double r_perp, double E, int n = 41, double xi_max = 0.0) {
    if (!(xi_max > 0.0)) xi_max = max_accessible_xi(E);
    const auto req = transverse_request_from_xi(E, linspace(0.0, xi_max, n), TransparencyWindow{});
    return scan(HbtRadii::from_radii(r_perp, 0.0), req);
}

}  // namespace

TEST_CASE("noiseless round trip") {
    for (auto method : {FitMethod::linearized_log, FitMethod::nonlinear_ls}) {
        const auto fit = fit_scan(transverse_scan(100.0, 3.0), method);
        CHECK(fit.method == method);
        CHECK(fit.radius == doctest::Approx(100.0).epsilon(1e-6));
        CHECK(std::abs(fit.intercept - 1.5) < 1e-9);
    }
}

TEST_CASE("round trip over a battery of radii and energies") {
    for (double r : {30.0, 100.0, 300.0, 1000.0, 3000.0}) {
        for (double E : {2.0, 3.0, 4.5}) {
            // out to C - 1 = e^-9 / 2, or the window edge
            const double xi_max = std::min(max_accessible_xi(E), 3.0 * units::hbar_c / r);
            const auto fit = fit_scan(transverse_scan(r, E, 61, xi_max));
            CHECK(fit.radius == doctest::Approx(r).epsilon(1e-6));
            CHECK(std::abs(fit.intercept - 1.5) < 1e-9);
        }
    }
}

TEST_CASE("longitudinal round trip") {
    const auto r = HbtRadii::from_radii(0.0, units::light_travel_nm(100.0));
    const auto s = scan(r, ScanRequest{ScanKind::longitudinal, 3.0, linspace(0.0, 5e-3, 30), std::nullopt});
    const auto fit = fit_scan(s);
    CHECK(fit.radius == doctest::Approx(units::light_travel_nm(100.0)).epsilon(1e-6));
}

TEST_CASE("fit of a Monte Carlo scan is statistically consistent") {
    SourceModel m;
    m.geometry = {100.0, 0.0, 0.0};
    const auto req = transverse_request_from_xi(3.0, linspace(0.0, 4.0, 21));
    const auto mc = mc_correlator(m, req, {100'000, 17, 1, 0.5});
    for (auto method : {FitMethod::linearized_log, FitMethod::nonlinear_ls}) {
        const auto fit = fit_scan(mc, method);
        CHECK(fit.radius_err > 0.0);
        CHECK(std::abs(fit.radius - 100.0) < 3.0 * fit.radius_err);
        CHECK(fit.intercept <= 1.5 + 3.0 * fit.intercept_err);
    }
}

TEST_CASE("flat and sparse scans are unfittable") {
    CHECK_THROWS_AS(fit_scan(transverse_scan(1.0, 3.0)), UnfittableError);
    CHECK_THROWS_AS(fit_scan(transverse_scan(100.0, 3.0, 4)), UnfittableError);
    // C - 1 below the deterministic floor everywhere but the origin
    CHECK_THROWS_AS(fit_scan(transverse_scan(30000.0, 3.0)), UnfittableError);
}

TEST_CASE("rising data means a negative R^2") {
    auto s = transverse_scan(100.0, 3.0, 10);
    for (std::size_t i = 0; i < s.size(); ++i) s.points[i].value = 1.2 + 0.02 * static_cast<double>(i);
    CHECK_THROWS_AS(fit_scan(s, FitMethod::linearized_log), ApproximationBreakdownError);
}

TEST_CASE("band-width dilution hits the intercept, not the transverse width") {
    SourceModel m;
    m.geometry = {100.0, 300.0, 0.0};
    std::vector<double> xi = linspace(0.0, 3.0, 13);
    ScanResult s;
    s.kind = ScanKind::transverse;
    s.E = 3.0;
    // fixed energy width, so the dilution is the same at every opening angle
    const double dw = filter_width_eV(413.28, 1.0, WidthConvention::rms);
    for (double x : xi) {
        const double phi = phi_from_xi(3.0, x);
        const double w = equal_energy_photon(3.0, phi);
        const auto f = FilterSpec::from_energy(w, dw);
        s.abscissae.push_back(phi);
        s.points.push_back(averaged_correlator(m, f, f, phi));
    }
    const auto fit = fit_scan(s);
    const double r_par = std::sqrt(1e4 + std::pow(units::light_travel_nm(300.0), 2));
    CHECK(std::abs(fit.intercept - effective_intercept(dw, r_par)) < 1e-3);
    CHECK(fit.radius == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("pulse length from the intercept") {
    const double dw = filter_width_eV(413.28, 1.0);
    CHECK(pulse_length_from_intercept(1.0 + 0.5 / std::sqrt(5.0), dw).delta_tau_fs == doctest::Approx(90.675).epsilon(1e-4));
    CHECK(pulse_length_from_intercept(1.02264, dw).delta_tau_fs == doctest::Approx(1000.0).epsilon(1e-3));
    CHECK(pulse_length_from_intercept(1.5, dw).delta_tau_fs == 0.0);
    CHECK_THROWS_AS(pulse_length_from_intercept(1.51, dw), DomainError);
    CHECK_THROWS_AS(pulse_length_from_intercept(1.0, dw), DomainError);
    CHECK_THROWS_AS(pulse_length_from_intercept(0.9, dw), DomainError);

    double worst = 0.0;
    for (double t = 1.0; t <= 1e5; t *= 1.2) {
        const double c = effective_intercept(dw, units::light_travel_nm(t));
        worst = std::max(worst, std::abs(pulse_length_from_intercept(c, dw).delta_tau_fs / t - 1.0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("transverse resolvability") {
    const auto r10 = resolve_transverse(10.0, 3.0);
    CHECK(r10.verdict == Verdict::marginal);
    CHECK(r10.limiting_factor == LimitingFactor::window_edge);
    CHECK(r10.edge_suppression == doctest::Approx(0.2422).epsilon(1e-3));

    CHECK(resolve_transverse(100.0, 3.0).verdict == Verdict::resolvable);
    CHECK(resolve_transverse(100.0, 3.0).xi_one_over_e == doctest::Approx(1.973).epsilon(1e-3));

    const auto r3um = resolve_transverse(3000.0, 3.0, {}, Instrument{2.0, 2.0, 0.0});
    CHECK(r3um.verdict == Verdict::unresolvable);
    CHECK(r3um.limiting_factor == LimitingFactor::angular_resolution);
    CHECK(r3um.required_value == doctest::Approx(1.256).epsilon(1e-3));
    CHECK(r3um.required_unit == "deg");
    CHECK(resolve_transverse(3000.0, 3.0, {}, Instrument{1.0, 1.0, 0.0}).verdict == Verdict::resolvable);
}

TEST_CASE("verdicts never leave resolvable as R_perp grows to 1 um") {
    bool reached = false;
    for (double r = 10.0; r <= 1000.0; r *= 1.05) {
        const auto v = resolve_transverse(r, 3.0).verdict;
        if (reached) CHECK(v == Verdict::resolvable);
        reached = reached || v == Verdict::resolvable;
    }
    CHECK(reached);
}

TEST_CASE("longitudinal resolvability") {
    const auto rep = resolve_longitudinal(1000.0, Instrument{1.0, 1.0, 1e-3});
    CHECK(rep.verdict == Verdict::unresolvable);
    CHECK(rep.limiting_factor == LimitingFactor::filter_bandwidth);
    CHECK(rep.required_value == doctest::Approx(0.6582).epsilon(1e-4));
    CHECK(rep.required_unit == "meV");
    CHECK(resolve_longitudinal(50.0, Instrument{1.0, 1.0, filter_width_eV(413.28, 1.0)}).verdict == Verdict::resolvable);
}

TEST_CASE("report formats") {
    const auto fit = fit_scan(transverse_scan(100.0, 3.0));
    const auto j = nlohmann::json::parse(to_json(fit));
    CHECK(j["radius_nm"].get<double>() == doctest::Approx(100.0));
    CHECK(to_key_value(fit).find("radius_nm=100") != std::string::npos);
    const auto rep = nlohmann::json::parse(to_json(resolve_transverse(10.0, 3.0)));
    CHECK(rep["verdict"] == "marginal");
    CHECK(to_key_value(resolve_transverse(10.0, 3.0)).find("limiting_factor=window_edge") != std::string::npos);
}
