#pragma once

#include <iosfwd>
#include <string>

#include "varcert/certify.hpp"

namespace varcert {

// 17-significant-digit decimal form; round-trips every finite double.
std::string format_double(double v);

// Deterministic JSON rendering: fixed key order, fixed number format,
// every field present (null when a stage did not run), no wall-clock
// data.  Identical reports serialize to identical bytes.
std::string to_json(const CertificationReport& report);

void write_report(const std::string& path, const CertificationReport& report);

// Human-oriented rendering, including per-stage wall clock.
void print_report(std::ostream& os, const CertificationReport& report);

}  // namespace varcert
