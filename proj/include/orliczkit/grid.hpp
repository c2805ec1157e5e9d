#pragma once

#include <vector>

namespace orliczkit {

/// Geometric grid on [lo, hi]; the endpoints are reproduced exactly.
struct LogGrid {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 241;

  std::vector<double> values() const;
  void validate() const;
};

}  // namespace orliczkit
