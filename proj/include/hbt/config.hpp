#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hbt/correlator.hpp"
#include "hbt/extraction.hpp"
#include "hbt/filter.hpp"
#include "hbt/source.hpp"

namespace hbt {

// Everything a command needs. Keys are addressed as "section.key".
struct RunConfig {
    // [source]
    double sigma_r_nm = 100.0;
    double delta_tau_fs = 0.0;
    FlowProfile flow = FlowProfile::none;
    double flow_v_over_c = 0.0;
    double flow_T_eV = 1.0;
    std::string corrections = "off";  // off | paper | matched

    // [spectrum]
    SpectrumKind spectrum_kind = SpectrumKind::exponential;
    double spectrum_T_eV = 1.0;
    double spectrum_alpha = 2.0;
    std::string spectrum_table;

    // [detector]
    double E_eV = 3.0;
    double window_min_eV = 1.5;
    double window_max_eV = 6.0;
    bool clip = true;
    double dlambda_nm = 1.0;
    WidthConvention width_convention = WidthConvention::rms;
    double delta_omega_eV = 0.0;  // > 0 overrides dlambda_nm
    double min_opening_angle_deg = 1.0;
    double angular_aperture_deg = 1.0;

    // [scan]
    ScanKind scan_kind = ScanKind::transverse;
    int points = 41;
    double xi_max_eV = 0.0;  // 0: window edge
    double q0_max_meV = 10.0;
    EnergyMode energy_mode = EnergyMode::on_shell_approx;

    // [engine]
    std::string path = "analytic";  // analytic | quadrature | mc
    std::size_t n_pairs = 1'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double lambda = kEqualHelicityFraction;

    // [output]
    std::string dir = ".";
    std::string file = "scan.csv";
    std::string format = "kv";  // kv | json, for reports

    // [intercept]
    double tau_min_fs = 1.0;
    double tau_max_fs = 1e5;
    int intercept_points = 61;

    // [resolve]
    std::string resolve_target = "transverse";  // transverse | longitudinal
    double marginal_floor = 0.20;
    double marginal_bandwidth_ratio = 1.2;

    // [fit]
    std::string fit_input;
    FitMethod fit_method = FitMethod::nonlinear_ls;

    // Sets one key from text; ConfigError names the key and line.
    void set(const std::string& key, const std::string& value, int line = 0);

    // Resolved configuration as (key, value) pairs, in a fixed order. Worker
    // count and output directory are left out: they do not change results.
    KeyValueList embedded() const;

    SourceModel source_model() const;
    Spectrum spectrum() const;
    TransparencyWindow window() const;
    Instrument instrument() const;
    double filter_width_eV() const;
    void validate() const;
};

struct ConfigEntry {
    std::string key;  // section.key
    std::string value;
    int line;
};

// "[section]" blocks of "key = value" lines; '#' and ';' start comments.
// A scan CSV is accepted too: its "# config:" lines are the entries.
std::vector<ConfigEntry> parse_config(std::istream& in);
std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path);

void apply(RunConfig& config, const std::vector<ConfigEntry>& entries);

// Parameter families of the published figures.
//   fig1  transverse, E = 3 eV, R_perp in {10, 100, 1000, 3000} nm
//   fig2  longitudinal, E = 3 eV, R_par = c {0.1, 1, 10} ps, q0 up to 10 meV
//   fig3  intercept curve, dlambda = 1 nm at 413.28 nm
std::vector<RunConfig> figure_preset(const std::string& name, const RunConfig& base = {});

}  // namespace hbt
