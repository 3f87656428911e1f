#include "hbt/scan_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hbt/errors.hpp"

namespace hbt {

namespace {

constexpr const char* kMagic = "# hbt-scan v1";
constexpr const char* kConfigPrefix = "# config: ";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line, const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("not a number: '" + t + "'", key, line);
    return value;
}

EvalPath path_from_engine(const std::string& engine) {
    if (engine == "quadrature") return EvalPath::quadrature;
    if (engine == "mc") return EvalPath::monte_carlo;
    return EvalPath::analytic;
}

PairKinematicsd kinematics_at(ScanKind kind, double E, double abscissa) {
    switch (kind) {
        case ScanKind::transverse: {
            const double omega = equal_energy_photon(E, abscissa);
            return pair_from_detector(omega, omega, abscissa);
        }
        case ScanKind::longitudinal:
            return pair_from_detector(E + 0.5 * abscissa, E - 0.5 * abscissa, 0.0);
        case ScanKind::intercept:
            return pair_from_detector(E, E, 0.0);
    }
    return {};
}

}  // namespace

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

const char* abscissa_name(ScanKind kind) {
    switch (kind) {
        case ScanKind::transverse: return "phi";
        case ScanKind::longitudinal: return "q0";
        case ScanKind::intercept: return "delta_tau";
    }
    return "unknown";
}

const char* abscissa_unit(ScanKind kind) {
    switch (kind) {
        case ScanKind::transverse: return "rad";
        case ScanKind::longitudinal: return "eV";
        case ScanKind::intercept: return "fs";
    }
    return "unknown";
}

void write_scan_csv(std::ostream& out, const ScanResult& scan, const std::optional<std::string>& generated) {
    scan.validate();
    out << kMagic << '\n';
    if (generated) out << "# generated=" << *generated << '\n';
    out << "# scan_kind=" << to_string(scan.kind) << '\n';
    out << "# E_eV=" << format_number(scan.E) << '\n';
    out << "# abscissa=" << abscissa_name(scan.kind) << '\n';
    out << "# abscissa_unit=" << abscissa_unit(scan.kind) << '\n';
    out << "# source_label=" << scan.source_label << '\n';
    for (const auto& [k, v] : scan.metadata) out << "# " << k << '=' << v << '\n';
    for (const auto& [k, v] : scan.config) out << kConfigPrefix << k << '=' << v << '\n';

    const bool with_xi = scan.kind == ScanKind::transverse;
    out << "abscissa,value,stat_error" << (with_xi ? ",xi" : "") << '\n';
    for (std::size_t i = 0; i < scan.size(); ++i) {
        out << format_number(scan.abscissae[i]) << ',' << format_number(scan.points[i].value) << ','
            << format_number(scan.points[i].stat_error);
        if (with_xi) out << ',' << format_number(scan.xi(i));
        out << '\n';
    }
}

void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan,
                    const std::optional<std::string>& generated) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_scan_csv(out, scan, generated);
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

ScanResult read_scan_csv(std::istream& in) {
    ScanResult scan;
    std::string line;
    int line_no = 0;
    bool have_kind = false, have_E = false, in_body = false;
    std::string engine;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        if (!in_body && line.rfind('#', 0) == 0) {
            if (line_no == 1 && trim(line) == kMagic) continue;
            if (line.rfind(kConfigPrefix, 0) == 0) {
                const std::string kv = line.substr(std::string(kConfigPrefix).size());
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ConfigError("config line without '='", {}, line_no);
                scan.config.emplace_back(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
                continue;
            }
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;  // free comment
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key == "scan_kind") {
                try {
                    scan.kind = scan_kind_from_string(value);
                } catch (const DomainError& e) {
                    throw ConfigError(e.what(), key, line_no);
                }
                have_kind = true;
            } else if (key == "E_eV") {
                scan.E = parse_number(value, line_no, key);
                have_E = true;
            } else if (key == "source_label") {
                scan.source_label = value;
            } else if (key == "abscissa" || key == "abscissa_unit" || key == "generated") {
                // implied by scan_kind / not part of the result
            } else {
                if (key == "engine") engine = value;
                scan.metadata.emplace_back(key, value);
            }
            continue;
        }

        if (!in_body) {
            if (trim(line).rfind("abscissa,value,stat_error", 0) != 0)
                throw ConfigError("expected column header 'abscissa,value,stat_error'", {}, line_no);
            if (!have_kind || !have_E) throw ConfigError("scan_kind and E_eV must precede the data", {}, line_no);
            in_body = true;
            continue;
        }

        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2 || cells.size() > 4) throw ConfigError("expected 2 to 4 columns", {}, line_no);
        const double a = parse_number(cells[0], line_no, "abscissa");
        CorrelatorPoint p;
        p.value = parse_number(cells[1], line_no, "value");
        p.stat_error = cells.size() > 2 ? parse_number(cells[2], line_no, "stat_error") : 0.0;
        p.path = path_from_engine(engine);
        try {
            p.kinematics = kinematics_at(scan.kind, scan.E, a);
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), "abscissa", line_no);
        }
        scan.abscissae.push_back(a);
        scan.points.push_back(p);
    }
    if (!in_body) throw ConfigError("no data section in scan file");
    try {
        scan.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return scan;
}

ScanResult read_scan_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    return read_scan_csv(in);
}

}  // namespace hbt
