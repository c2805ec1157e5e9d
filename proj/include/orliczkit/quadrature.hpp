#pragma once

#include <functional>
#include <vector>

namespace orliczkit::quad {

using Integrand = std::function<double(double)>;

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_subintervals = 400;
};

struct Panel {
  double value = 0.0;
  double error = 0.0;
};

/// One 21-point Gauss-Kronrod panel on [a, b].
Panel gk21(const Integrand& f, double a, double b);

/// Adaptive GK21 on a finite interval, split at the supplied breakpoints.
double integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks = {},
                 const Options& opt = {});

/// Integral over (0, b] for integrands with an integrable singularity or slow
/// decay at 0. Throws Error(divergent_integral) when the blocks stop shrinking.
double integrate_from_zero(const Integrand& f, double b, const std::vector<double>& breaks = {},
                           const Options& opt = {});

/// Integral over [a, inf). Throws Error(divergent_integral) on a divergent tail.
double integrate_to_infinity(const Integrand& f, double a, const std::vector<double>& breaks = {},
                             const Options& opt = {});

}  // namespace orliczkit::quad
