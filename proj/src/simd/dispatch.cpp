#include <atomic>
#include <cstdlib>
#include <string_view>

#include "orliczkit/simd/kernels.hpp"

namespace orliczkit::simd {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("ORLICZKIT_SIMD"); env && std::string_view(env) == "scalar")
    return Isa::scalar;
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return avx2::available() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2::available()) isa = Isa::scalar;
  active().store(isa);
}

double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu) {
  return active_isa() == Isa::avx2 ? avx2::max_chord_slope(v, fv, u, fu) : scalar::max_chord_slope(v, fv, u, fu);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

}  // namespace orliczkit::simd
