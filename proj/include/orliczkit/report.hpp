#pragma once

#include <string>

#include <json.hpp>

#include "orliczkit/conditions.hpp"

namespace orliczkit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Condition report as a JSON object; c_min only when the status is holds,
/// witness only when it is not.
nlohmann::json condition_json(const ConditionReport& r);

/// Top-level report: {schema, tool_version, command, params, status, c_min?,
/// witness?, values?, grid, tolerances}. Null c_min, witness and values are
/// omitted.
nlohmann::json make_report(const std::string& command, nlohmann::json params, const std::string& status,
                           nlohmann::json c_min, nlohmann::json witness, nlohmann::json values, nlohmann::json grid,
                           nlohmann::json tolerances);

nlohmann::json report_from_condition(const std::string& command, const ConditionReport& r);

/// Keys are sorted, so equal reports render to equal bytes.
std::string render_json(const nlohmann::json& report);

/// Pointwise profile as "x,c" rows, or key,value rows for reports without one.
std::string render_csv(const nlohmann::json& report);

}  // namespace orliczkit
