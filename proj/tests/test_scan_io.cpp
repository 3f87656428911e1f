#include <doctest.h>

#include <sstream>

#include "hbt/errors.hpp"
#include "hbt/scan_io.hpp"

using namespace hbt;

namespace {

ScanResult sample(ScanKind kind) {
    const auto r = HbtRadii::from_radii(100.0, 3000.0);
    ScanRequest req{kind, 3.0, {}, std::nullopt};
    req.grid = kind == ScanKind::transverse ? std::vector<double>{0.0, 0.1, 0.2 + 1e-17}
                                            : std::vector<double>{0.0, 1e-3, 2e-3};
    auto s = scan(r, req);
    s.config = {{"source.sigma_r_nm", "100"}, {"engine.seed", "7"}};
    return s;
}

}  // namespace

TEST_CASE("write then read reproduces every double") {
    for (auto kind : {ScanKind::transverse, ScanKind::longitudinal}) {
        const auto s = sample(kind);
        std::stringstream buf;
        write_scan_csv(buf, s);
        const auto back = read_scan_csv(buf);
        CHECK(back.kind == s.kind);
        CHECK(back.E == s.E);
        CHECK(back.source_label == s.source_label);
        CHECK(back.metadata == s.metadata);
        CHECK(back.config == s.config);
        REQUIRE(back.size() == s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(back.abscissae[i] == s.abscissae[i]);
            CHECK(back.points[i].value == s.points[i].value);
            CHECK(back.points[i].kinematics.q_perp == doctest::Approx(s.points[i].kinematics.q_perp).epsilon(1e-14));
            CHECK(back.points[i].kinematics.q_par == doctest::Approx(s.points[i].kinematics.q_par).epsilon(1e-14));
        }
    }
}

TEST_CASE("layout") {
    std::stringstream buf;
    write_scan_csv(buf, sample(ScanKind::transverse), std::string("2026-01-01T00:00:00Z"));
    const std::string text = buf.str();
    CHECK(text.rfind("# hbt-scan v1\n# generated=2026-01-01T00:00:00Z\n# scan_kind=transverse\n", 0) == 0);
    CHECK(text.find("# abscissa_unit=rad\n") != std::string::npos);
    CHECK(text.find("# config: engine.seed=7\n") != std::string::npos);
    CHECK(text.find("abscissa,value,stat_error,xi\n0,1.5,0,0\n") != std::string::npos);

    std::stringstream lon;
    write_scan_csv(lon, sample(ScanKind::longitudinal));
    CHECK(lon.str().find("abscissa,value,stat_error\n") != std::string::npos);
    CHECK(lon.str().find("# generated") == std::string::npos);
}

TEST_CASE("measured data with two columns") {
    std::istringstream in("# scan_kind=transverse\n# E_eV=3\nabscissa,value,stat_error\n0,1.49\n0.1,1.4\n");
    const auto s = read_scan_csv(in);
    CHECK(s.size() == 2);
    CHECK(s.points[1].stat_error == 0.0);
}

TEST_CASE("malformed files name the line") {
    std::istringstream bad_number("# scan_kind=transverse\n# E_eV=3\nabscissa,value,stat_error\n0,1.5,0\n0.1,x,0\n");
    try {
        read_scan_csv(bad_number);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 5);
    }
    std::istringstream no_kind("# E_eV=3\nabscissa,value,stat_error\n0,1.5,0\n");
    CHECK_THROWS_AS(read_scan_csv(no_kind), ConfigError);
    std::istringstream unordered("# scan_kind=longitudinal\n# E_eV=3\nabscissa,value,stat_error\n0.1,1.5,0\n0,1.5,0\n");
    CHECK_THROWS_AS(read_scan_csv(unordered), ConfigError);
}
