#include <doctest.h>

#include <sstream>

#include "hbt/config.hpp"
#include "hbt/errors.hpp"
#include "hbt/run.hpp"
#include "hbt/scan_io.hpp"

using namespace hbt;

TEST_CASE("blocks and comments") {
    std::istringstream in(
        "# run\n[source]\nsigma_r_nm = 250   ; nm\ndelta_tau_fs=40\n\n[engine]\npath = mc\nn_pairs = 2e4\nseed = 99\n");
    RunConfig c;
    hbt::apply(c, parse_config(in));
    CHECK(c.sigma_r_nm == 250.0);
    CHECK(c.delta_tau_fs == 40.0);
    CHECK(c.path == "mc");
    CHECK(c.n_pairs == 20000);
    CHECK(c.seed == 99);
}

TEST_CASE("diagnostics carry line and key") {
    auto fails_at = [](const std::string& text, int line, const std::string& key) {
        std::istringstream in(text);
        RunConfig c;
        try {
            hbt::apply(c, parse_config(in));
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line() == line);
            CHECK(e.key() == key);
        }
    };
    fails_at("[source]\nsigma_r_nm = ten\n", 2, "source.sigma_r_nm");
    fails_at("[source]\n\nradius = 3\n", 3, "source.radius");
    fails_at("[engine]\npath = magic\n", 2, "engine.path");
    fails_at("[scan]\npoints = 2.5\n", 2, "scan.points");
    fails_at("[scan]\nkind = diagonal\n", 2, "scan.kind");
    fails_at("[scan\n", 1, "");
    fails_at("sigma_r_nm = 3\n", 1, "sigma_r_nm");
}

TEST_CASE("wavelength sets the pair energy") {
    RunConfig c;
    c.set("detector.lambda_nm", "413.28066");
    CHECK(c.E_eV == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("embedded configuration reproduces the run") {
    RunConfig c;
    c.sigma_r_nm = 123.0;
    c.scan_kind = ScanKind::longitudinal;
    c.delta_tau_fs = 10.0;
    c.points = 7;
    c.workers = 4;
    c.dir = "/somewhere";
    const auto s = run_scan(c);

    std::stringstream csv;
    write_scan_csv(csv, s);
    RunConfig again;
    hbt::apply(again, parse_config(csv));
    CHECK(again.embedded() == c.embedded());
    CHECK(again.workers == 1);  // not part of the embedded config
    CHECK(again.dir == ".");

    std::stringstream a, b;
    write_scan_csv(a, s);
    write_scan_csv(b, run_scan(again));
    CHECK(a.str() == b.str());
}

TEST_CASE("figure presets") {
    const auto f1 = figure_preset("fig1");
    REQUIRE(f1.size() == 4);
    CHECK(f1[0].sigma_r_nm == 10.0);
    CHECK(f1[3].sigma_r_nm == 3000.0);
    for (const auto& c : f1) {
        const auto s = run_scan(c);
        CHECK(s.E == 3.0);
        CHECK(s.xi(s.size() - 1) == doctest::Approx(6.0 * std::sqrt(3.0)).epsilon(1e-12));
    }
    const auto f2 = figure_preset("fig2");
    REQUIRE(f2.size() == 3);
    CHECK(f2[1].delta_tau_fs == 1000.0);
    const auto f3 = figure_preset("fig3");
    REQUIRE(f3.size() == 1);
    const auto ic = run_intercept(f3[0]);
    CHECK(*ic.knee_fs == doctest::Approx(90.675).epsilon(1e-5));
    CHECK_THROWS_AS(figure_preset("fig9"), ConfigError);
}

TEST_CASE("resolve from config") {
    RunConfig c;
    c.sigma_r_nm = 10.0;
    CHECK(run_resolve(c).verdict == Verdict::marginal);
    c.resolve_target = "longitudinal";
    c.delta_tau_fs = 1000.0;
    CHECK(run_resolve(c).verdict == Verdict::unresolvable);
}
