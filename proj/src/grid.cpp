#include "orliczkit/grid.hpp"

#include <cmath>

#include "orliczkit/errors.hpp"

namespace orliczkit {

void LogGrid::validate() const {
  if (!(lo > 0) || !(hi > lo) || !std::isfinite(hi))
    raise(ErrorCode::invalid_argument, "log grid needs 0 < lo < hi < inf");
  if (points < 1) raise(ErrorCode::invalid_argument, "log grid needs at least one point");
}

std::vector<double> LogGrid::values() const {
  validate();
  std::vector<double> out(static_cast<size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace orliczkit
