#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "orliczkit/funcspace.hpp"

namespace orliczkit {

/// Output of an operator applied to a step function, evaluable pointwise.
class OperatorOutput {
 public:
  virtual ~OperatorOutput() = default;
  virtual double operator()(double x) const = 0;
  virtual Domain domain() const = 0;
  /// Points where the output changes form or is singular.
  virtual std::vector<double> breakpoints() const = 0;
};

struct Term {
  enum class Kind { constant, power, log_ratio };
  Kind kind = Kind::constant;
  double c = 0.0;
  double a = 0.0;  // power: exponent; log_ratio: log|x - a| - log|x - b|
  double b = 0.0;

  double operator()(double x) const;
};

struct ClosedPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Term> terms;
};

/// Sum of constant, c x^e and c log(|x - a| / |x - b|) terms on each piece.
/// Evaluation at a logarithmic singularity returns a signed infinity.
class PiecewiseClosedForm final : public OperatorOutput {
 public:
  PiecewiseClosedForm(std::vector<ClosedPiece> pieces, Domain domain);

  double operator()(double x) const override;
  Domain domain() const override { return domain_; }
  std::vector<double> breakpoints() const override;
  const std::vector<ClosedPiece>& pieces() const { return pieces_; }

 private:
  std::vector<ClosedPiece> pieces_;
  Domain domain_;
};

PiecewiseClosedForm hardy_P(double p, const StepFunction& f);
PiecewiseClosedForm hardy_Q(double q, const StepFunction& f);
PiecewiseClosedForm integral_I(const StepFunction& f);
PiecewiseClosedForm hilbert(const StepFunction& f);

/// {x : (If)(x) > lambda} for f >= 0 is empty or the ray (from, inf).
struct LevelSet {
  bool empty = true;
  double from = 0.0;
};
LevelSet level_set_I(const StepFunction& f, double lambda);

/// Hardy-Littlewood maximal function of |f|, evaluated exactly by
/// enumerating intervals whose endpoints are breakpoints of f or x itself.
class MaximalFunction final : public OperatorOutput {
 public:
  explicit MaximalFunction(const StepFunction& f);

  double operator()(double x) const override;
  Domain domain() const override { return Domain::line; }
  std::vector<double> breakpoints() const override { return knots_; }

 private:
  double primitive(double x) const;

  StepFunction f_;
  std::vector<double> knots_;
  std::vector<double> F_;
};

MaximalFunction maximal(const StepFunction& f);

enum class OpKind { P, Q, I, M, H };

struct OperatorSpec {
  OpKind kind = OpKind::P;
  double param = 1.0;  // p for P, q for Q

  std::string tag() const;
};

OperatorSpec parse_operator(std::string_view text);

std::shared_ptr<const OperatorOutput> apply(const OperatorSpec& op, const StepFunction& f);

/// max over probes t of |(Tf)(lambda t) - T(f(lambda .))(t)|, skipping
/// probes where either side is a singular sentinel.
double check_dilation_commute(const OperatorSpec& op, const StepFunction& f, double lambda,
                              const std::vector<double>& probes);

/// int Phi(k |g(x)|) w(x) dx over the domain of g. Throws
/// Error(divergent_integral) naming the failing region.
double modular_of_output(const YoungFunction& phi, const OperatorOutput& g, const PowerWeight& w, double k = 1.0);

}  // namespace orliczkit
