#include <doctest.h>

#include <random>

#include "hbt/units.hpp"

using namespace hbt;

TEST_CASE("constants") {
    CHECK(units::hbar_c == 197.3269804);
    CHECK(units::c == 299.792458);
    CHECK(units::two_pi_hbar_c == doctest::Approx(1239.8419839593942).epsilon(1e-14));
    CHECK(units::PhysicalConstants<float>::hbar_c == doctest::Approx(197.327f));
}

TEST_CASE("3 eV photon sits at 413.28 nm") {
    CHECK(units::wavelength_from_energy(3.0) == doctest::Approx(413.28066).epsilon(1e-8));
    CHECK(units::energy_from_wavelength(413.2807) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("1 nm at 413.28 nm is 7.259 meV") {
    const double dw = units::energy_width_from_wavelength_width(413.2807, 1.0);
    CHECK(dw == doctest::Approx(7.25899e-3).epsilon(1e-5));
}

TEST_CASE("wavelength round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(100.0, 1500.0);
    for (int i = 0; i < 1000; ++i) {
        const double l = lam(rng);
        CHECK(std::abs(units::wavelength_from_energy(units::energy_from_wavelength(l)) - l) <= 1e-12 * l);
    }
}

TEST_CASE("one picosecond of light") {
    CHECK(units::light_travel_nm(1000.0) == doctest::Approx(299792.458));
}
