#pragma once

namespace thermoctl {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "thermoctl.report";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace thermoctl
