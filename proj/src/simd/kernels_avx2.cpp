#include <limits>

#include "orliczkit/simd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define ORLICZKIT_HAVE_AVX2_PATH 1
#endif

namespace orliczkit::simd::avx2 {

#ifdef ORLICZKIT_HAVE_AVX2_PATH

bool available() { return __builtin_cpu_supports("avx2"); }

namespace {
inline double vmax(double a, double b) { return a > b ? a : b; }
}  // namespace

__attribute__((target("avx2"))) double max_chord_slope(std::span<const double> v, std::span<const double> fv,
                                                       double u, double fu) {
  const std::size_t n = v.size();
  const std::size_t n4 = n - n % 4;
  const __m256d uu = _mm256_set1_pd(u);
  const __m256d ff = _mm256_set1_pd(fu);
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d num = _mm256_sub_pd(_mm256_loadu_pd(fv.data() + i), ff);
    const __m256d den = _mm256_sub_pd(_mm256_loadu_pd(v.data() + i), uu);
    // maxpd(a, b) = a > b ? a : b, matching the scalar lanes.
    acc = _mm256_max_pd(_mm256_div_pd(num, den), acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double r = vmax(vmax(lane[1], lane[0]), vmax(lane[3], lane[2]));
  for (std::size_t i = n4; i < n; ++i) r = vmax((fv[i] - fu) / (v[i] - u), r);
  return r;
}

__attribute__((target("avx2"))) double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t n4 = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double p = a[i] * b[i];
    r = r + p;
  }
  return r;
}

#else

bool available() { return false; }

double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu) {
  return scalar::max_chord_slope(v, fv, u, fu);
}

double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }

#endif

}  // namespace orliczkit::simd::avx2
