#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "orliczkit/conditions.hpp"
#include "orliczkit/grid.hpp"

namespace orliczkit {

struct RunConfig {
  LogGrid grid;
  CSearch search;
  int threads = 1;
  std::string output;  // empty means stdout
  std::string format = "json";

  void validate() const;
  /// Settings that shape results. Thread count and output path are left
  /// out so reports do not depend on them.
  nlohmann::json echo() const;
};

/// Overlays a JSON config document on base. Throws Error(config_error).
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Defaults, then the file at path (if non-empty), then ORLICZKIT_THREADS.
RunConfig load_config(const std::string& path);

}  // namespace orliczkit
