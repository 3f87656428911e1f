#include "hbt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "hbt/errors.hpp"
#include "hbt/scan_io.hpp"

namespace hbt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError("expected a number, got '" + text + "'", key, line);
    return v;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text, int line) {
    // Accept "1e6" style counts as long as they are integral.
    const double v = to_double(key, text, line);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
        throw ConfigError("expected a non-negative integer, got '" + text + "'", key, line);
    return static_cast<Int>(v);
}

bool to_bool(const std::string& key, const std::string& text, int line) {
    if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "off" || text == "no" || text == "0") return false;
    throw ConfigError("expected true/false, got '" + text + "'", key, line);
}

std::string one_of(const std::string& key, const std::string& text, int line, std::initializer_list<const char*> ok) {
    for (const char* o : ok)
        if (text == o) return text;
    std::string list;
    for (const char* o : ok) list += (list.empty() ? "" : "|") + std::string(o);
    throw ConfigError("expected one of " + list + ", got '" + text + "'", key, line);
}

template <class F>
auto wrap_domain(const std::string& key, int line, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), key, line);
    }
}

struct KeySpec {
    const char* name;
    std::function<void(RunConfig&, const std::string&, int)> set;
    std::function<std::string(const RunConfig&)> get;  // empty: not embedded
};

#define HBT_NUM(key, field)                                                                              \
    KeySpec {                                                                                            \
        key, [](RunConfig& c, const std::string& v, int l) { c.field = to_double(key, v, l); },          \
            [](const RunConfig& c) { return format_number(c.field); }                                    \
    }

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        HBT_NUM("source.sigma_r_nm", sigma_r_nm),
        HBT_NUM("source.delta_tau_fs", delta_tau_fs),
        {"source.flow",
         [](RunConfig& c, const std::string& v, int l) {
             c.flow = wrap_domain("source.flow", l, [&] { return flow_profile_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.flow)); }},
        HBT_NUM("source.flow_v_over_c", flow_v_over_c),
        HBT_NUM("source.flow_T_eV", flow_T_eV),
        {"source.corrections",
         [](RunConfig& c, const std::string& v, int l) {
             c.corrections = one_of("source.corrections", v, l, {"off", "paper", "matched"});
         },
         [](const RunConfig& c) { return c.corrections; }},

        {"spectrum.kind",
         [](RunConfig& c, const std::string& v, int l) {
             c.spectrum_kind = wrap_domain("spectrum.kind", l, [&] { return spectrum_kind_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.spectrum_kind)); }},
        HBT_NUM("spectrum.T_eV", spectrum_T_eV),
        HBT_NUM("spectrum.alpha", spectrum_alpha),
        {"spectrum.table", [](RunConfig& c, const std::string& v, int) { c.spectrum_table = v; },
         [](const RunConfig& c) { return c.spectrum_table; }},

        HBT_NUM("detector.E_eV", E_eV),
        {"detector.lambda_nm",
         [](RunConfig& c, const std::string& v, int l) {
             const double lambda = to_double("detector.lambda_nm", v, l);
             if (!(lambda > 0.0)) throw ConfigError("wavelength must be positive", "detector.lambda_nm", l);
             c.E_eV = units::energy_from_wavelength(lambda);
         },
         nullptr},
        HBT_NUM("detector.window_min_eV", window_min_eV),
        HBT_NUM("detector.window_max_eV", window_max_eV),
        {"detector.clip", [](RunConfig& c, const std::string& v, int l) { c.clip = to_bool("detector.clip", v, l); },
         [](const RunConfig& c) { return std::string(c.clip ? "true" : "false"); }},
        HBT_NUM("detector.dlambda_nm", dlambda_nm),
        {"detector.width_convention",
         [](RunConfig& c, const std::string& v, int l) {
             c.width_convention =
                 wrap_domain("detector.width_convention", l, [&] { return width_convention_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.width_convention)); }},
        HBT_NUM("detector.delta_omega_eV", delta_omega_eV),
        HBT_NUM("detector.min_opening_angle_deg", min_opening_angle_deg),
        HBT_NUM("detector.angular_aperture_deg", angular_aperture_deg),

        {"scan.kind",
         [](RunConfig& c, const std::string& v, int l) {
             c.scan_kind = wrap_domain("scan.kind", l, [&] { return scan_kind_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.scan_kind)); }},
        {"scan.points",
         [](RunConfig& c, const std::string& v, int l) { c.points = to_integer<int>("scan.points", v, l); },
         [](const RunConfig& c) { return std::to_string(c.points); }},
        HBT_NUM("scan.xi_max_eV", xi_max_eV),
        HBT_NUM("scan.q0_max_meV", q0_max_meV),
        {"scan.energy_mode",
         [](RunConfig& c, const std::string& v, int l) {
             c.energy_mode = wrap_domain("scan.energy_mode", l, [&] { return energy_mode_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.energy_mode)); }},

        {"engine.path",
         [](RunConfig& c, const std::string& v, int l) {
             c.path = one_of("engine.path", v, l, {"analytic", "quadrature", "mc"});
         },
         [](const RunConfig& c) { return c.path; }},
        {"engine.n_pairs",
         [](RunConfig& c, const std::string& v, int l) {
             c.n_pairs = to_integer<std::size_t>("engine.n_pairs", v, l);
         },
         [](const RunConfig& c) { return std::to_string(c.n_pairs); }},
        {"engine.seed",
         [](RunConfig& c, const std::string& v, int l) {
             std::uint64_t s = 0;
             const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
             if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
                 throw ConfigError("expected an unsigned integer seed, got '" + v + "'", "engine.seed", l);
             c.seed = s;
         },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        {"engine.workers",
         [](RunConfig& c, const std::string& v, int l) {
             c.workers = to_integer<unsigned>("engine.workers", v, l);
         },
         nullptr},
        HBT_NUM("engine.lambda", lambda),

        {"output.dir", [](RunConfig& c, const std::string& v, int) { c.dir = v; }, nullptr},
        {"output.file", [](RunConfig& c, const std::string& v, int) { c.file = v; },
         [](const RunConfig& c) { return c.file; }},
        {"output.format",
         [](RunConfig& c, const std::string& v, int l) { c.format = one_of("output.format", v, l, {"kv", "json"}); },
         [](const RunConfig& c) { return c.format; }},

        HBT_NUM("intercept.tau_min_fs", tau_min_fs),
        HBT_NUM("intercept.tau_max_fs", tau_max_fs),
        {"intercept.points",
         [](RunConfig& c, const std::string& v, int l) {
             c.intercept_points = to_integer<int>("intercept.points", v, l);
         },
         [](const RunConfig& c) { return std::to_string(c.intercept_points); }},

        {"resolve.target",
         [](RunConfig& c, const std::string& v, int l) {
             c.resolve_target = one_of("resolve.target", v, l, {"transverse", "longitudinal"});
         },
         [](const RunConfig& c) { return c.resolve_target; }},
        HBT_NUM("resolve.marginal_floor", marginal_floor),
        HBT_NUM("resolve.marginal_bandwidth_ratio", marginal_bandwidth_ratio),

        {"fit.input", [](RunConfig& c, const std::string& v, int) { c.fit_input = v; }, nullptr},
        {"fit.method",
         [](RunConfig& c, const std::string& v, int l) {
             c.fit_method = wrap_domain("fit.method", l, [&] { return fit_method_from_string(v); });
         },
         [](const RunConfig& c) { return std::string(to_string(c.fit_method)); }},
    };
    return table;
}

#undef HBT_NUM

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, int line) {
    for (const auto& spec : key_table()) {
        if (key == spec.name) {
            spec.set(*this, trim(value), line);
            return;
        }
    }
    throw ConfigError("unknown key", key, line);
}

KeyValueList RunConfig::embedded() const {
    KeyValueList out;
    for (const auto& spec : key_table())
        if (spec.get) out.emplace_back(spec.name, spec.get(*this));
    return out;
}

Spectrum RunConfig::spectrum() const {
    switch (spectrum_kind) {
        case SpectrumKind::exponential: return Spectrum::exponential(spectrum_T_eV);
        case SpectrumKind::power_law: return Spectrum::power_law(spectrum_alpha);
        case SpectrumKind::blackbody: return Spectrum::blackbody(spectrum_T_eV);
        case SpectrumKind::tabulated:
            if (spectrum_table.empty()) throw ConfigError("tabulated spectrum needs a table file", "spectrum.table");
            return Spectrum::read_table(std::filesystem::path(spectrum_table));
    }
    throw ConfigError("unknown spectrum kind", "spectrum.kind");
}

SourceModel RunConfig::source_model() const {
    SourceModel m;
    m.geometry = {sigma_r_nm, delta_tau_fs, 0.0};
    m.spectrum = spectrum();
    m.flow = {flow, flow_v_over_c, flow_T_eV};
    m.validate();
    return m;
}

TransparencyWindow RunConfig::window() const {
    return {window_min_eV, window_max_eV};
}

Instrument RunConfig::instrument() const {
    return {min_opening_angle_deg, angular_aperture_deg, filter_width_eV()};
}

double RunConfig::filter_width_eV() const {
    if (delta_omega_eV > 0.0) return delta_omega_eV;
    return hbt::filter_width_eV(units::wavelength_from_energy(E_eV), dlambda_nm, width_convention);
}

void RunConfig::validate() const {
    if (!(E_eV > 0.0)) throw ConfigError("pair energy must be positive", "detector.E_eV");
    if (!(window_min_eV < window_max_eV)) throw ConfigError("empty transparency window", "detector.window_max_eV");
    if (points < 1) throw ConfigError("need at least one grid point", "scan.points");
    if (intercept_points < 1) throw ConfigError("need at least one grid point", "intercept.points");
    if (!(tau_min_fs > 0.0) || !(tau_max_fs >= tau_min_fs))
        throw ConfigError("need 0 < tau_min <= tau_max", "intercept.tau_max_fs");
    if (dlambda_nm < 0.0) throw ConfigError("filter width must be non-negative", "detector.dlambda_nm");
    if (!(lambda > 0.0) || lambda > 1.0) throw ConfigError("lambda must lie in (0, 1]", "engine.lambda");
}

std::vector<ConfigEntry> parse_config(std::istream& in) {
    std::vector<ConfigEntry> out;
    std::string raw;
    std::string section;
    int line_no = 0;
    bool scan_file = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1 && trim(raw).rfind("# hbt-scan", 0) == 0) {
            scan_file = true;
            continue;
        }
        if (scan_file) {
            static const std::string prefix = "# config: ";
            if (raw.rfind(prefix, 0) == 0) {
                const std::string kv = raw.substr(prefix.size());
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ConfigError("expected key=value", {}, line_no);
                out.push_back({trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), line_no});
            } else if (raw.empty() || raw[0] != '#') {
                break;  // data section
            }
            continue;
        }

        std::string line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", {}, line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", {}, line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", {}, line_no);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("missing key before '='", {}, line_no);
        if (section.empty() && key.find('.') == std::string::npos)
            throw ConfigError("key outside any [section]", key, line_no);
        out.push_back({section.empty() ? key : section + "." + key, trim(line.substr(eq + 1)), line_no});
    }
    return out;
}

std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

void apply(RunConfig& config, const std::vector<ConfigEntry>& entries) {
    for (const auto& e : entries) config.set(e.key, e.value, e.line);
}

namespace {

std::string radius_tag(double nm) {
    std::ostringstream out;
    out << nm;
    return out.str();
}

}  // namespace

std::vector<RunConfig> figure_preset(const std::string& name, const RunConfig& base) {
    std::vector<RunConfig> out;
    if (name == "fig1") {
        for (double r : {10.0, 100.0, 1000.0, 3000.0}) {
            RunConfig c = base;
            c.scan_kind = ScanKind::transverse;
            c.E_eV = 3.0;
            c.window_min_eV = 1.5;
            c.window_max_eV = 6.0;
            c.xi_max_eV = 0.0;
            c.sigma_r_nm = r;
            c.delta_tau_fs = 0.0;
            c.corrections = "off";
            c.path = "analytic";
            c.points = 105;
            c.file = "fig1_rperp_" + radius_tag(r) + "nm.csv";
            out.push_back(c);
        }
    } else if (name == "fig2") {
        for (double ps : {0.1, 1.0, 10.0}) {
            RunConfig c = base;
            c.scan_kind = ScanKind::longitudinal;
            c.E_eV = 3.0;
            c.sigma_r_nm = 0.0;
            c.delta_tau_fs = ps * units::fs_per_ps;
            c.corrections = "off";
            c.path = "analytic";
            c.q0_max_meV = 10.0;
            c.points = 101;
            c.file = "fig2_rpar_" + radius_tag(ps) + "ps.csv";
            out.push_back(c);
        }
    } else if (name == "fig3") {
        RunConfig c = base;
        c.E_eV = 3.0;
        c.dlambda_nm = 1.0;
        c.width_convention = WidthConvention::rms;
        c.delta_omega_eV = 0.0;
        c.tau_min_fs = 1.0;
        c.tau_max_fs = 1e5;
        c.intercept_points = 61;
        c.file = "fig3_intercept.csv";
        out.push_back(c);
    } else {
        throw ConfigError("unknown figure preset '" + name + "' (fig1, fig2, fig3)", "figure");
    }
    return out;
}

}  // namespace hbt
