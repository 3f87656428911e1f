#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hbt/correlator.hpp"

namespace hbt {

// Scan CSV, version 1:
//
//   # hbt-scan v1
//   # generated=<UTC timestamp>            only when a timestamp is given
//   # scan_kind=transverse|longitudinal|intercept
//   # E_eV=<pair energy>
//   # abscissa=phi|q0|delta_tau
//   # abscissa_unit=rad|eV|fs
//   # source_label=<text>
//   # <key>=<value>                        metadata, in order
//   # config: <section>.<key>=<value>      resolved run configuration, in order
//   abscissa,value,stat_error[,xi]
//   ...
//
// Numbers are printed with %.17g so a file read back reproduces every double.
// Transverse scans carry a fourth column xi = 2 E tan(phi/2) [eV].
void write_scan_csv(std::ostream& out, const ScanResult& scan, const std::optional<std::string>& generated = {});
void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan,
                    const std::optional<std::string>& generated = {});

// ConfigError (with line number) on malformed input.
ScanResult read_scan_csv(std::istream& in);
ScanResult read_scan_csv(const std::filesystem::path& path);

const char* abscissa_name(ScanKind kind);
const char* abscissa_unit(ScanKind kind);

std::string format_number(double value);

}  // namespace hbt
