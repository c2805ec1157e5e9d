#include <limits>

#include "orliczkit/simd/kernels.hpp"

namespace orliczkit::simd::scalar {

namespace {
inline double vmax(double a, double b) { return a > b ? a : b; }
}  // namespace

double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu) {
  const std::size_t n = v.size();
  const std::size_t n4 = n - n % 4;
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  double lane[4] = {ninf, ninf, ninf, ninf};
  for (std::size_t i = 0; i < n4; i += 4)
    for (std::size_t k = 0; k < 4; ++k) lane[k] = vmax((fv[i + k] - fu) / (v[i + k] - u), lane[k]);
  double r = vmax(vmax(lane[1], lane[0]), vmax(lane[3], lane[2]));
  for (std::size_t i = n4; i < n; ++i) r = vmax((fv[i] - fu) / (v[i] - u), r);
  return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t n4 = n - n % 4;
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n4; i += 4)
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = a[i + k] * b[i + k];
      lane[k] = lane[k] + p;
    }
  double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double p = a[i] * b[i];
    r = r + p;
  }
  return r;
}

}  // namespace orliczkit::simd::scalar
