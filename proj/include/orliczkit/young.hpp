#pragma once

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orliczkit/grid.hpp"

namespace orliczkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed form of a density on one segment.
class DensityForm {
 public:
  virtual ~DensityForm() = default;
  virtual double value(double s) const = 0;
  /// Integral of the density over [a, b] (a <= b, both inside the segment).
  virtual double integral(double a, double b) const = 0;
  /// Solves value(s) = y; only called on strictly increasing forms.
  virtual double inverse(double y) const = 0;
  virtual bool constant() const { return false; }
  /// True when the form is nondecreasing on [lo, hi).
  virtual bool nondecreasing_on(double lo, double hi) const = 0;
  virtual std::string describe() const = 0;
};

using FormPtr = std::shared_ptr<const DensityForm>;

// c
FormPtr constant_form(double c);
// k + c (s - h)^e; e = 1 gives the linear pieces.
FormPtr power_form(double k, double c, double h, double e);
// k + c log(s - h)
FormPtr log_form(double k, double c, double h);
// k + c exp(b s)
FormPtr exp_form(double k, double c, double b);
// s^(r-1) log(e + s)^a
FormPtr powlog_form(double r, double a);
// Generalized inverse of a strictly increasing form.
FormPtr inverse_form(FormPtr base);

struct DensitySegment {
  double lo = 0.0;
  double hi = kInf;
  FormPtr form;
  double vlo = 0.0;  // value at lo
  double vhi = 0.0;  // left limit at hi
};

enum class YoungKind { young, general };

/// Nondecreasing density phi on [0, inf) stored as contiguous closed-form
/// segments, together with Phi(t) = int_0^t phi and the generalized inverse.
/// A decreasing density is accepted as kind general: Phi evaluates, inversion
/// and conjugation reject it.
class YoungFunction {
 public:
  YoungFunction(std::vector<DensitySegment> segments, std::string spec);

  YoungKind kind() const { return kind_; }
  bool monotone() const { return monotone_; }
  const std::string& spec() const { return spec_; }
  const std::vector<DensitySegment>& segments() const { return segs_; }

  double Phi(double t) const;
  double phi(double s) const;
  /// sup{t >= 0 : phi(t) <= y}
  double phi_inv(double y) const;
  double phi_zero() const { return segs_.front().vlo; }
  double phi_sup() const { return segs_.back().vhi; }

  YoungFunction complementary() const;

  /// Interior segment boundaries in t.
  std::vector<double> t_breaks() const;
  /// Finite density levels where phi_inv changes form.
  std::vector<double> y_breaks() const;

 private:
  std::size_t locate(double s) const;

  std::vector<DensitySegment> segs_;
  std::vector<double> cum_;
  std::string spec_;
  YoungKind kind_ = YoungKind::general;
  bool monotone_ = true;
};

YoungFunction parse_young_spec(std::string_view spec);

YoungFunction make_power(double r);
YoungFunction make_plog(double r, double a);
YoungFunction make_expm1();
YoungFunction make_pwl_density(const std::vector<std::pair<double, double>>& points);
YoungFunction make_appendix2(double gamma);

inline double eval_Phi(const YoungFunction& y, double t) { return y.Phi(t); }
inline double eval_phi_inv(const YoungFunction& y, double s) { return y.phi_inv(s); }
inline YoungFunction complementary(const YoungFunction& y) { return y.complementary(); }

/// The auxiliary function chi of the counterexample family, with the
/// breakpoint sequence a_0 = 1, a_k = (k+3)!.
class AppendixChi {
 public:
  explicit AppendixChi(int kmax);
  int kmax() const { return static_cast<int>(a_.size()) - 1; }
  double a(int k) const { return a_.at(static_cast<std::size_t>(k)); }
  double value(double s) const;
  /// int_0^t chi, exact piecewise.
  double integral(double t) const;

 private:
  std::vector<double> a_;
};

/// Largest k for which (k+3)! is an exactly representable double.
inline constexpr int kAppendixExactK = 14;

struct Delta2Report {
  bool holds = false;
  double c_min = 0.0;
  double witness_t = 0.0;
  double worst_ratio = 0.0;
  double threshold = 1e8;
  LogGrid grid;
};

Delta2Report check_delta2(const YoungFunction& y, const LogGrid& grid, double threshold = 1e8);

struct SConvexSample {
  double alpha, beta, x, y;
};

struct SConvexReport {
  bool holds = false;
  double worst_slack = kInf;
  SConvexSample worst{};
  std::size_t samples = 0;
};

/// Tuples with alpha^s + beta^s = 1 over a coarse grid of x, y.
std::vector<SConvexSample> s_convex_samples(double s, const LogGrid& xy, int alpha_steps);

SConvexReport check_s_convex(const YoungFunction& y, double s, const std::vector<SConvexSample>& samples);

}  // namespace orliczkit
