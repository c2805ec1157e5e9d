#pragma once

#include <span>

// Data-parallel inner loops. Every kernel has a scalar reference and, on
// x86-64, an AVX2 variant selected at runtime. Both variants use the same
// four-lane accumulation order, so their results are bitwise identical.

namespace orliczkit::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Best ISA supported by the running CPU.
Isa detected_isa();

/// ISA used by the dispatching entry points. Defaults to detected_isa(),
/// unless ORLICZKIT_SIMD=scalar is set in the environment.
Isa active_isa();
void set_active_isa(Isa isa);

// max_j (fv[j] - fu) / (v[j] - u); -inf for empty input.
double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu);

// sum_j a[j] * b[j]
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

namespace avx2 {
bool available();
double max_chord_slope(std::span<const double> v, std::span<const double> fv, double u, double fu);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace avx2

}  // namespace orliczkit::simd
