#include "orliczkit/report.hpp"

#include <cmath>
#include <sstream>

namespace orliczkit {

using nlohmann::json;

json condition_json(const ConditionReport& r) {
  json out = {{"condition", r.condition},
              {"params", r.params},
              {"status", to_string(r.status)},
              {"grid", r.grid},
              {"tolerances", r.tolerances},
              {"values", r.values},
              {"details", r.details}};
  if (r.holds())
    out["c_min"] = r.c_min;
  else
    out["witness"] = r.witness;
  return out;
}

json make_report(const std::string& command, json params, const std::string& status, json c_min, json witness,
                 json values, json grid, json tolerances) {
  json out = {{"schema", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"command", command},
              {"params", std::move(params)},
              {"status", status},
              {"grid", std::move(grid)},
              {"tolerances", std::move(tolerances)}};
  if (!c_min.is_null()) out["c_min"] = std::move(c_min);
  if (!witness.is_null()) out["witness"] = std::move(witness);
  if (!values.is_null()) out["values"] = std::move(values);
  return out;
}

json report_from_condition(const std::string& command, const ConditionReport& r) {
  json params = r.params;
  params["condition"] = r.condition;
  return make_report(command, std::move(params), to_string(r.status), r.holds() ? json(r.c_min) : json(nullptr),
                     r.holds() ? json(nullptr) : r.witness, {{"profile", r.values}, {"details", r.details}}, r.grid,
                     r.tolerances);
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

namespace {

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "inf";
  return v.dump();
}

}  // namespace

std::string render_csv(const json& report) {
  std::ostringstream os;
  const json* profile = nullptr;
  if (report.contains("values") && report["values"].is_object() && report["values"].contains("profile"))
    profile = &report["values"]["profile"];
  if (profile && profile->is_array() && !profile->empty() && (*profile)[0].is_object()) {
    std::vector<std::string> cols;
    for (auto it = (*profile)[0].begin(); it != (*profile)[0].end(); ++it) cols.push_back(it.key());
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : *profile) {
      for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cell(row.value(cols[i], json(nullptr)));
      os << "\n";
    }
    return os.str();
  }
  os << "key,value\n";
  for (auto it = report.begin(); it != report.end(); ++it)
    if (!it->is_structured()) os << it.key() << "," << cell(*it) << "\n";
  return os.str();
}

}  // namespace orliczkit
