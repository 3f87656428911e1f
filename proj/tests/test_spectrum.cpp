#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hbt/errors.hpp"
#include "hbt/moments.hpp"
#include "hbt/spectrum.hpp"
#include "hbt/units.hpp"

using namespace hbt;

namespace {
const double hc2 = units::hbar_c * units::hbar_c;
}

TEST_CASE("exponential correction terms") {
    const auto s = Spectrum::exponential(1.0);
    const auto d = spectrum_log_derivs(s, 3.0);
    CHECK(d.first == -1.0);
    CHECK(d.second == 0.0);
    const auto c = correction_terms(s, 3.0);
    CHECK(c.delta_r_perp_sq == doctest::Approx(-1622.4).epsilon(1e-4));
    CHECK(c.delta_r_perp_sq == doctest::Approx(-hc2 / 24.0).epsilon(1e-14));
    CHECK(c.delta_r_par_sq == 0.0);
}

TEST_CASE("power-law correction terms") {
    const auto c = correction_terms(Spectrum::power_law(2.0), 3.0);
    CHECK(c.delta_r_perp_sq == doctest::Approx(1081.6).epsilon(1e-4));
    CHECK(c.delta_r_par_sq == doctest::Approx(-2163.2).epsilon(1e-4));
}

TEST_CASE("analytic log-derivatives agree with finite differences") {
    for (const auto& s : {Spectrum::exponential(0.7), Spectrum::power_law(1.5), Spectrum::blackbody(1.0),
                          Spectrum::blackbody(4.0)}) {
        for (double E : {1.5, 3.0, 5.5}) {
            const auto a = spectrum_log_derivs(s, E);
            const auto f = finite_difference_log_derivs(s, E, 1e-3 * E);
            CHECK(f.first == doctest::Approx(a.first).epsilon(1e-6));
            if (std::abs(a.second) > 1e-12) CHECK(f.second == doctest::Approx(a.second).epsilon(1e-5));
        }
    }
}

TEST_CASE("tabulated spectrum reproduces an exponential") {
    std::vector<double> E, I;
    for (double e = 1.0; e <= 7.0; e += 0.25) {
        E.push_back(e);
        I.push_back(std::exp(-e));
    }
    const auto s = Spectrum::tabulated(E, I);
    CHECK(s(3.1) == doctest::Approx(std::exp(-3.1)).epsilon(1e-12));
    const auto c = correction_terms(s, 3.0);
    CHECK(c.delta_r_perp_sq == doctest::Approx(-hc2 / 24.0).epsilon(1e-6));
    CHECK(std::abs(c.delta_r_par_sq) < 1e-3);
    CHECK_THROWS_AS(s(0.9), DomainError);
    CHECK_THROWS_AS(spectrum_log_derivs(s, 1.001), DomainError);
}

TEST_CASE("tabulated spline is exact at its knots and smooth between") {
    std::vector<double> E = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<double> I;
    for (double e : E) I.push_back(e * e * std::exp(-e / 2.0));
    const auto s = Spectrum::tabulated(E, I);
    for (std::size_t i = 0; i < E.size(); ++i) CHECK(s(E[i]) == doctest::Approx(I[i]).epsilon(1e-14));
        // natural cubic spline through log I, evaluated independently
    CHECK(s(3.5) == doctest::Approx(2.1185396314311498).epsilon(1e-12));
    CHECK(s(3.5) == doctest::Approx(3.5 * 3.5 * std::exp(-1.75)).epsilon(1e-2));
}

TEST_CASE("table reader") {
    std::istringstream in("# E, I\n1.0, 1.0\n2.0 0.5\n\n3.0,0.25  # comment\n4.0 0.125\n");
    const auto s = Spectrum::read_table(in);
    CHECK(s.kind() == SpectrumKind::tabulated);
    CHECK(s(2.5) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    std::istringstream bad("1 1\n2 -1\n3 1\n4 1\n");
    CHECK_THROWS_AS(Spectrum::read_table(bad), Error);
    CHECK_THROWS_AS(Spectrum::tabulated({1, 2, 3}, {1, 1, 1}), DomainError);
    CHECK_THROWS_AS(Spectrum::tabulated({1, 3, 2, 4}, {1, 1, 1, 1}), DomainError);
}

TEST_CASE("domain") {
    const auto s = Spectrum::exponential(1.0);
    CHECK_THROWS_AS(s(0.05), DomainError);
    CHECK_THROWS_AS(s(25.0), DomainError);
    CHECK_THROWS_AS(Spectrum::exponential(-1.0), DomainError);
    CHECK_NOTHROW(s(20.0));
}

TEST_CASE("kind names round trip") {
    for (auto k : {SpectrumKind::exponential, SpectrumKind::power_law, SpectrumKind::blackbody, SpectrumKind::tabulated})
        CHECK(spectrum_kind_from_string(to_string(k)) == k);
}
