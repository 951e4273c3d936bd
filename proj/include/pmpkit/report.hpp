#pragma once

#include <string>

#include "pmpkit/checker.hpp"

namespace pmpkit {

enum class ReportFormat { Text, Structured };

/// Deterministic, byte-stable report for a certificate. The structured
/// variant is JSON with a fixed key order.
std::string emit_report(const Certificate& certificate, ReportFormat format);

}  // namespace pmpkit
