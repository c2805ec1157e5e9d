#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orliczkit/funcspace.hpp"
#include "orliczkit/grid.hpp"
#include "orliczkit/young.hpp"

namespace orliczkit {

enum class Status { holds, fails, divergent };

const char* to_string(Status s);

/// Outcome of a condition check on a finite grid.
struct ConditionReport {
  std::string condition;
  nlohmann::json params = nlohmann::json::object();
  Status status = Status::holds;
  double c_min = 0.0;  // meaningful when status == holds
  nlohmann::json witness = nlohmann::json::object();
  nlohmann::json grid = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  /// Pointwise minimal constants, one entry per grid point.
  nlohmann::json values = nlohmann::json::array();

  bool holds() const { return status == Status::holds; }
};

/// Search range and resolution for minimal constants.
struct CSearch {
  double lo = 1e-6;
  double hi = 1e8;
  double rel_width = 1e-6;
};

/// Process-wide search range used by every checker.
const CSearch& search_defaults();
void set_search_defaults(const CSearch& s);

/// Smallest C in [lo, hi] with pred(C) true, for pred monotone in C.
/// Returns lo when pred(lo) holds and +inf when pred(hi) fails.
double minimal_constant(const std::function<bool(double)>& pred, const CSearch& s);
double minimal_constant(const std::function<bool(double)>& pred);

struct GrowthFinding {
  bool unbounded = false;
  std::vector<double> peak_x;  // refined only where a run was examined
  std::vector<double> peak_c;
  std::size_t run_begin = 0;  // offending run is peaks [run_begin, run_end]
  std::size_t run_end = 0;
  std::size_t witness = 0;  // largest peak of the run
};

/// Looks for interior peaks of a pointwise-constant profile and flags a run
/// of at least 5 peaks, each 2% above the previous and 25% overall, at
/// either end of the grid. refine(lo, hi) returns the sup of the profile on
/// [lo, hi].
GrowthFinding detect_growth(const std::vector<double>& xs, const std::vector<double>& cs,
                            const std::function<double(double)>& profile);

// Conditions on P_p and Q_q

double alpha_Pp(const YoungFunction& phi1, double p, double gamma, double t);

ConditionReport check_bk_Pp(const YoungFunction& phi1, const YoungFunction& phi2, double p, double gamma,
                            const LogGrid& grid = {});

/// Same check parameterized by 1/p, which admits 1/p = 0.
ConditionReport check_bk_Pp_inv(const YoungFunction& phi1, const YoungFunction& phi2, double inv_p, double gamma,
                                const LogGrid& grid = {});

ConditionReport check_bk_Pp_remark(const YoungFunction& phi1, const YoungFunction& phi2, double p, double gamma,
                                   const LogGrid& grid = {});

double beta_Qq(const YoungFunction& phi2, double q, double gamma, double t);

ConditionReport check_bk_Qq(const YoungFunction& phi1, const YoungFunction& phi2, double q, double gamma,
                            const LogGrid& grid = {});

// Maximal and Hilbert operators on power-weighted R

/// (1/t) int_0^t phi^-1(s^-gamma) ds; +inf when the integral diverges.
double averaged_inverse(const YoungFunction& phi, double gamma, double t);

ConditionReport check_maximal_condition(const YoungFunction& phi, double gamma, const LogGrid& grid = {});
ConditionReport check_hilbert_condition(const YoungFunction& phi, double gamma, const LogGrid& grid = {});

ConditionReport check_aphi_power(const YoungFunction& phi, double gamma, const LogGrid& grid = {});

struct Interval {
  double a = 0.0;
  double b = 1.0;
};

/// Interval shapes used when none are given: [0,1], [-1,1], [1/2,1], [-1/2,1], [1,2].
std::vector<Interval> default_shapes();

/// A_phi on intervals of R. With no explicit intervals the shapes are scaled
/// over the grid (eps = 1); for gamma = 0 the eps grid is scanned instead.
ConditionReport check_aphi_general(const YoungFunction& phi, const PowerWeight& w,
                                   const std::vector<Interval>& intervals = {}, const LogGrid& grid = {});

/// Value of the A_phi quantity on one interval and eps; +inf when divergent.
double aphi_quantity(const YoungFunction& phi, const PowerWeight& w, Interval q, double eps);

ConditionReport check_bk_general(const YoungFunction& phi, const PowerWeight& w,
                                 const std::vector<Interval>& intervals = {}, const LogGrid& lambda_grid = {});

struct FourWeights {
  PowerWeight t, u, v, w;
};

nlohmann::json to_json(const PowerWeight& w);

double alpha_fourweight(const YoungFunction& phi1, const FourWeights& W, double lambda, double x);

ConditionReport check_fourweight_condition(const YoungFunction& phi1, const YoungFunction& phi2, const FourWeights& W,
                                           const LogGrid& x_grid = {}, const LogGrid& lambda_grid = {1e-2, 1e2, 9});

/// mu_gamma(I) / |I| divided by max(|a|, |b|)^gamma.
double weight_ratio(double gamma, double a, double b);

}  // namespace orliczkit
