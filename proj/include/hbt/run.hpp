#pragma once

#include "hbt/config.hpp"
#include "hbt/extraction.hpp"
#include "hbt/filter.hpp"

namespace hbt {

// Scan described by a configuration, with the resolved configuration embedded.
ScanResult run_scan(const RunConfig& config);

// Effective-intercept curve on a log grid of flash durations; knee in metadata.
InterceptCurve run_intercept(const RunConfig& config);

ResolvabilityReport run_resolve(const RunConfig& config);

// Grid of the configured scan: phi [rad] for transverse, q0 [eV] for longitudinal.
ScanRequest scan_request(const RunConfig& config);

}  // namespace hbt
