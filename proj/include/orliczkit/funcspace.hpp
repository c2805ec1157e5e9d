#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "orliczkit/young.hpp"

namespace orliczkit {

enum class Domain { half_line, line };

const char* to_string(Domain d);
Domain parse_domain(std::string_view tag);

struct Piece {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Finite sum of c * indicator(a, b) with disjoint intervals, sorted by a.
/// Values may be signed; operators and modulars use |f| where the theory does.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<Piece> pieces, Domain domain = Domain::half_line);

  const std::vector<Piece>& pieces() const { return pieces_; }
  Domain domain() const { return domain_; }
  bool is_zero() const;
  double value(double x) const;
  /// Sorted distinct interval endpoints.
  std::vector<double> breakpoints() const;
  double support_lo() const;
  double support_hi() const;

  StepFunction scaled(double c) const;
  StepFunction abs() const;
  /// f restricted to (lo, hi).
  StepFunction truncated(double lo, double hi) const;

 private:
  std::vector<Piece> pieces_;
  Domain domain_ = Domain::half_line;
};

/// y -> f(lambda y)
StepFunction dilate(const StepFunction& f, double lambda);
/// Pointwise sum by breakpoint overlay.
StepFunction add(const StepFunction& f, const StepFunction& g);

StepFunction parse_step_function(std::string_view json_text, Domain domain);
StepFunction load_step_function(const std::string& path, Domain domain);
std::string step_function_json(const StepFunction& f);

/// w(x) = coeff * |x|^gamma
struct PowerWeight {
  double gamma = 0.0;
  double coeff = 1.0;
  Domain domain = Domain::half_line;

  double operator()(double x) const;
  /// mu(a, b) = int_a^b w; throws Error(divergent_integral) when infinite.
  double measure(double a, double b) const;
};

/// sum over pieces of Phi(k |c|) mu(piece)
double modular(const YoungFunction& phi, const StepFunction& f, const PowerWeight& w, double k);

struct GaugeResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// inf{lambda > 0 : (eps / lambda) modular(phi, f, w, 1 / lambda) <= 1}
GaugeResult gauge(const YoungFunction& phi, const StepFunction& f, const PowerWeight& w, double eps = 1.0);

/// inf{lambda > 0 : modular(phi, f, mu, lambda^(-1/s)) <= 1}
GaugeResult gauge_s(const YoungFunction& phi, const StepFunction& f, const PowerWeight& mu, double s);

}  // namespace orliczkit
