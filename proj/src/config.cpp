#include "orliczkit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "orliczkit/errors.hpp"

namespace orliczkit {

using nlohmann::json;

void RunConfig::validate() const {
  if (!(grid.lo > 0.0 && grid.hi > grid.lo)) raise(ErrorCode::config_error, "grid range must satisfy 0 < lo < hi");
  if (grid.points < 3) raise(ErrorCode::config_error, "grid needs at least 3 points");
  if (!(search.lo > 0.0 && search.hi > search.lo && search.rel_width > 0.0))
    raise(ErrorCode::config_error, "tolerances need 0 < c_lo < c_hi and c_rel_width > 0");
  if (threads < 1) raise(ErrorCode::config_error, "threads must be positive");
  if (format != "json" && format != "csv") raise(ErrorCode::config_error, "format must be json or csv");
}

json RunConfig::echo() const {
  return {{"grid", {{"lo", grid.lo}, {"hi", grid.hi}, {"points", grid.points}}},
          {"tolerances", {{"c_lo", search.lo}, {"c_hi", search.hi}, {"c_rel_width", search.rel_width}}},
          {"format", format}};
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) raise(ErrorCode::config_error, where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) raise(ErrorCode::config_error, "unknown key " + where + "." + it.key());
  }
}

template <class T>
T get(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    raise(ErrorCode::config_error, where + "." + key + " has the wrong type");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::config_error, std::string("malformed config: ") + e.what());
  }
  check_keys(doc, {"grid", "tolerances", "threads", "output", "format"}, "config");
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    check_keys(g, {"lo", "hi", "points"}, "grid");
    base.grid.lo = get(g, "lo", base.grid.lo, "grid");
    base.grid.hi = get(g, "hi", base.grid.hi, "grid");
    base.grid.points = get(g, "points", base.grid.points, "grid");
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    check_keys(t, {"c_lo", "c_hi", "c_rel_width"}, "tolerances");
    base.search.lo = get(t, "c_lo", base.search.lo, "tolerances");
    base.search.hi = get(t, "c_hi", base.search.hi, "tolerances");
    base.search.rel_width = get(t, "c_rel_width", base.search.rel_width, "tolerances");
  }
  base.threads = get(doc, "threads", base.threads, "config");
  base.output = get(doc, "output", base.output, "config");
  base.format = get(doc, "format", base.format, "config");
  base.validate();
  return base;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::config_error, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str(), cfg);
  }
  if (const char* env = std::getenv("ORLICZKIT_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) raise(ErrorCode::config_error, std::string("bad ORLICZKIT_THREADS: ") + env);
    cfg.threads = static_cast<int>(n);
  }
  cfg.validate();
  return cfg;
}

}  // namespace orliczkit
