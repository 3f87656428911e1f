#include <doctest.h>

#include "hbt/errors.hpp"
#include "hbt/moments.hpp"
#include "hbt/units.hpp"

using namespace hbt;

TEST_CASE("flow-free variances are the Gaussian widths") {
    SourceModel m;
    m.geometry = {100.0, 50.0, 0.0};
    const auto v = variances(m, 3.0);
    CHECK(v.var_x_perp == 1e4);
    CHECK(v.var_x_par == 1e4);
    CHECK(v.var_t == 2500.0);
    CHECK(v.cross_x_par_t == 0.0);
}

TEST_CASE("quadrature moments match the analytic ones") {
    SourceModel m;
    m.geometry = {100.0, 50.0, 7.0};
    const auto a = variances(m, 3.0, MomentPath::analytic);
    const auto q = variances(m, 3.0, MomentPath::quadrature);
    CHECK(q.var_x_perp == doctest::Approx(a.var_x_perp).epsilon(1e-12));
    CHECK(q.var_x_par == doctest::Approx(a.var_x_par).epsilon(1e-12));
    CHECK(q.var_t == doctest::Approx(a.var_t).epsilon(1e-12));
}

TEST_CASE("linear radial flow shifts the source but not its widths") {
    SourceModel m;
    m.geometry = {100.0, 50.0, 0.0};
    m.flow = {FlowProfile::linear_radial, 1e-2, 1.0};
    const auto v = variances(m, 3.0);
    // weight exp(E v x_par / (sigma T)) shifts x_par by E v sigma / T
    CHECK(v.mean_x_par == doctest::Approx(3.0 * 1e-2 * 100.0).epsilon(1e-9));
    CHECK(v.var_x_par == doctest::Approx(1e4).epsilon(1e-9));
    CHECK(v.var_x_perp == doctest::Approx(1e4).epsilon(1e-9));
    CHECK(std::abs(v.cross_x_par_t) < 1e-9);
    CHECK_THROWS_AS(variances(m, 3.0, MomentPath::analytic), DomainError);
}

TEST_CASE("radius composition") {
    SpaceTimeVariances v{1e4, 1e4, 100.0, 0.0, 0.0};
    const auto r = compose_radii(v);
    CHECK(r.r_perp() == doctest::Approx(100.0));
    CHECK(r.r_par_sq == doctest::Approx(1e4 + units::c * units::c * 100.0));
    const auto rc = compose_radii(v, {-1622.4, 50.0});
    CHECK(rc.r_perp_sq == doctest::Approx(1e4 - 1622.4));
    CHECK(rc.delta_r_par_sq == 50.0);
}

TEST_CASE("corrections that overwhelm the geometry break the approximation") {
    SpaceTimeVariances v{100.0, 100.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(compose_radii(v, {-1622.4, 0.0}), ApproximationBreakdownError);
    // zero geometric width without corrections is a valid limit
    CHECK_NOTHROW(compose_radii(SpaceTimeVariances{0.0, 0.0, 1e6, 0.0, 0.0}));
}

TEST_CASE("from_radii") {
    const auto r = HbtRadii::from_radii(10.0, 20.0);
    CHECK(r.r_perp_sq == 100.0);
    CHECK(r.r_par() == 20.0);
}
