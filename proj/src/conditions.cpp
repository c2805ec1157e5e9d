#include "orliczkit/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "orliczkit/errors.hpp"
#include "orliczkit/parallel.hpp"
#include "orliczkit/quadrature.hpp"

namespace orliczkit {

using nlohmann::json;

const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::divergent: return "divergent";
  }
  return "?";
}

namespace {
CSearch g_search;
}

const CSearch& search_defaults() { return g_search; }

void set_search_defaults(const CSearch& s) {
  if (!(s.lo > 0.0 && s.hi > s.lo && s.rel_width > 0.0))
    raise(ErrorCode::invalid_argument, "search range needs 0 < lo < hi and rel_width > 0");
  g_search = s;
}

double minimal_constant(const std::function<bool(double)>& pred) { return minimal_constant(pred, g_search); }

double minimal_constant(const std::function<bool(double)>& pred, const CSearch& s) {
  if (pred(s.lo)) return s.lo;
  if (!pred(s.hi)) return kInf;
  double lo = std::log(s.lo), hi = std::log(s.hi);
  const double width = std::log1p(s.rel_width);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (pred(std::exp(mid)) ? hi : lo) = mid;
  }
  return std::exp(hi);
}

namespace {

constexpr double kGrowthStep = 1.02;
constexpr double kGrowthTotal = 1.25;
constexpr std::size_t kGrowthRun = 5;

std::pair<double, double> refine_peak(const std::function<double(double)>& profile, double lo, double hi, double x0,
                                      double c0) {
  std::pair<double, double> best{x0, c0};
  auto take = [&best](double x, double c) {
    if (c > best.second) best = {x, c};
  };
  const double llo = std::log(lo), lhi = std::log(hi);
  constexpr int n = 24;
  int arg = 0;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = std::exp(llo + (lhi - llo) * i / n);
    v[i] = profile(x);
    take(x, v[i]);
    if (v[i] > v[arg]) arg = i;
  }
  double a = llo + (lhi - llo) * std::max(arg - 1, 0) / n;
  double b = llo + (lhi - llo) * std::min(arg + 1, n) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = profile(std::exp(c)), fd = profile(std::exp(d));
  take(std::exp(c), fc);
  take(std::exp(d), fd);
  for (int it = 0; it < 40; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = profile(std::exp(c));
      take(std::exp(c), fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = profile(std::exp(d));
      take(std::exp(d), fd);
    }
  }
  return best;
}

}  // namespace

GrowthFinding detect_growth(const std::vector<double>& xs, const std::vector<double>& cs,
                            const std::function<double(double)>& profile) {
  GrowthFinding g;
  const std::size_t n = cs.size();
  std::vector<std::size_t> at;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!std::isfinite(cs[i]) || !std::isfinite(cs[i - 1]) || !std::isfinite(cs[i + 1])) continue;
    if (!(cs[i] > cs[i - 1] && cs[i] >= cs[i + 1])) continue;
    if (cs[i] < (1.0 + 1e-3) * std::min(cs[i - 1], cs[i + 1])) continue;
    at.push_back(i);
    g.peak_x.push_back(xs[i]);
    g.peak_c.push_back(cs[i]);
  }
  const std::size_t m = g.peak_c.size();
  if (m < kGrowthRun) return g;
  // Only peaks reached by a run from either end are refined; the verdict
  // never looks past the first break of a run.
  std::vector<bool> refined(m, !profile);
  auto peak = [&](std::size_t k) {
    if (!refined[k]) {
      const std::size_t i = at[k];
      const auto [x, c] = refine_peak(profile, xs[i - 1], xs[i + 1], xs[i], cs[i]);
      g.peak_x[k] = x;
      g.peak_c[k] = c;
      refined[k] = true;
    }
    return g.peak_c[k];
  };
  // run ending at the last peak, growing toward the right end of the grid
  std::size_t begin = m - 1;
  while (begin > 0 && peak(begin) >= kGrowthStep * peak(begin - 1)) --begin;
  if (m - begin >= kGrowthRun && peak(m - 1) >= kGrowthTotal * peak(begin)) {
    g.unbounded = true;
    g.run_begin = begin;
    g.run_end = g.witness = m - 1;
    return g;
  }
  // run starting at the first peak, growing toward the left end
  std::size_t end = 0;
  while (end + 1 < m && peak(end) >= kGrowthStep * peak(end + 1)) ++end;
  if (end + 1 >= kGrowthRun && peak(0) >= kGrowthTotal * peak(end)) {
    g.unbounded = true;
    g.run_begin = g.witness = 0;
    g.run_end = end;
  }
  return g;
}

namespace {

json grid_json(const LogGrid& g, const char* var) {
  return {{"variable", var}, {"lo", g.lo}, {"hi", g.hi}, {"points", g.points}, {"spacing", "log"}};
}

json tolerance_json(const CSearch& s = search_defaults()) {
  return {{"c_lo", s.lo},
          {"c_hi", s.hi},
          {"c_rel_width", s.rel_width},
          {"quad_rel", 1e-9},
          {"growth_step", kGrowthStep},
          {"growth_total", kGrowthTotal},
          {"growth_run", kGrowthRun}};
}

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

quad::Options inner_opts() {
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-9;
  return o;
}

// Search range for each of two equivalent forms; the cap applies to their max.
constexpr double kFormSearchFactor = 1e4;

double form_constant(const std::function<bool(double)>& pred) {
  CSearch s = search_defaults();
  s.hi *= kFormSearchFactor;
  return minimal_constant(pred, s);
}

// Integrals that signal divergence with +inf instead of throwing.
double safe_from_zero(const quad::Integrand& f, double b, const std::vector<double>& breaks) {
  try {
    return quad::integrate_from_zero(f, b, breaks, inner_opts());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::divergent_integral) return kInf;
    throw;
  }
}

double safe_to_infinity(const quad::Integrand& f, double a, const std::vector<double>& breaks) {
  try {
    return quad::integrate_to_infinity(f, a, breaks, inner_opts());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::divergent_integral) return kInf;
    throw;
  }
}

// Points s in (0, t) where arg(s) = scale * s^-e crosses one of the levels.
std::vector<double> crossings(const std::vector<double>& levels, double scale, double e, double t) {
  std::vector<double> out;
  if (e == 0.0) return out;
  for (double y : levels) {
    const double s = std::pow(scale / y, 1.0 / e);
    if (s > 0.0 && s < t) out.push_back(s);
  }
  return out;
}

struct Point {
  double c = 0.0;
  bool divergent = false;
  std::string reason;
};

// Fills status, c_min, witness and values from pointwise minimal constants.
void summarize(ConditionReport& rep, const char* var, const std::vector<double>& xs, const std::vector<Point>& pts,
               const std::function<double(double)>& profile, const CSearch& search = search_defaults()) {
  rep.values = json::array();
  std::vector<double> cs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cs[i] = pts[i].c;
    rep.values.push_back({{var, xs[i]}, {"c", num_or_null(pts[i].c)}});
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].divergent) {
      rep.status = Status::divergent;
      rep.witness = {{var, xs[i]}, {"reason", pts[i].reason}};
      return;
    }
  std::size_t arg = 0;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i] > cs[arg]) arg = i;
  if (cs.empty()) {
    rep.status = Status::holds;
    rep.c_min = search.lo;
    return;
  }
  if (!(cs[arg] <= search.hi)) {
    rep.status = Status::fails;
    rep.witness = {{var, xs[arg]}, {"rule", "cap"}, {"cap", search.hi}};
    if (!pts[arg].reason.empty()) rep.witness["reason"] = pts[arg].reason;
    return;
  }
  const auto growth = detect_growth(xs, cs, profile);
  if (growth.unbounded) {
    rep.status = Status::fails;
    json peaks = json::array();
    for (std::size_t i = growth.run_begin; i <= growth.run_end; ++i)
      peaks.push_back({{var, growth.peak_x[i]}, {"c", growth.peak_c[i]}});
    const std::size_t w = growth.witness;
    rep.witness = {{var, growth.peak_x[w]}, {"c", growth.peak_c[w]}, {"rule", "unbounded-growth"}, {"peaks", peaks}};
    return;
  }
  rep.status = Status::holds;
  rep.c_min = cs[arg];
  rep.details["argmax"] = {{var, xs[arg]}};
}

}  // namespace

namespace {

// Shared shape of the P_p and Q_q conditions:
//   tail(t)  = int_t^inf tail_f(s) ds
//   primary: int_0^t G(tail / (C s^e1)) s^gamma ds <= tail
//   second:  int_0^t g(tail / (C s^e1)) s^e2 ds <= C
struct BkShape {
  std::function<double(double)> tail_f;
  std::vector<double> tail_breaks;
  std::function<double(double)> G;
  std::vector<double> G_levels;
  std::function<double(double)> g;
  std::vector<double> g_levels;
  double e1 = 0.0, e2 = 0.0, gamma = 0.0;
  ErrorCode tail_error = ErrorCode::divergent_alpha;
};

struct BkPoint {
  double tail = 0.0;
  double c_primary = 0.0;
  double c_second = 0.0;
  bool divergent = false;
};

double tail_integral(const BkShape& sh, double t) {
  return quad::integrate_to_infinity(sh.tail_f, t, sh.tail_breaks, inner_opts());
}

double bk_primary_lhs(const BkShape& sh, double tail, double t, double C) {
  const double k = tail / C;
  auto f = [&](double s) { return sh.G(k * std::pow(s, -sh.e1)) * std::pow(s, sh.gamma); };
  return safe_from_zero(f, t, crossings(sh.G_levels, k, sh.e1, t));
}

double bk_second_lhs(const BkShape& sh, double tail, double t, double C) {
  const double k = tail / C;
  auto f = [&](double s) { return sh.g(k * std::pow(s, -sh.e1)) * std::pow(s, sh.e2); };
  return safe_from_zero(f, t, crossings(sh.g_levels, k, sh.e1, t));
}

BkPoint bk_point(const BkShape& sh, double t) {
  BkPoint r;
  try {
    r.tail = tail_integral(sh, t);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::divergent_integral) throw;
    r.divergent = true;
    return r;
  }
  if (r.tail == 0.0) {
    r.c_primary = r.c_second = search_defaults().lo;
    return r;
  }
  r.c_primary = form_constant([&](double C) { return bk_primary_lhs(sh, r.tail, t, C) <= r.tail; });
  r.c_second = form_constant([&](double C) { return bk_second_lhs(sh, r.tail, t, C) <= C; });
  return r;
}

ConditionReport run_bk(const std::string& name, json params, const BkShape& sh, const LogGrid& grid,
                       const char* tail_name) {
  grid.validate();
  ConditionReport rep;
  rep.condition = name;
  rep.params = std::move(params);
  rep.grid = grid_json(grid, "t");
  rep.tolerances = tolerance_json();
  const auto ts = grid.values();
  const auto pts = parallel_map<BkPoint>(ts.size(), [&](std::size_t i) { return bk_point(sh, ts[i]); });
  std::vector<Point> merged(ts.size());
  json primary = json::array(), second = json::array();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& p = pts[i];
    if (p.divergent) {
      merged[i] = {kInf, true, std::string(tail_name) + "(t) diverges"};
      continue;
    }
    if (std::isinf(p.c_primary) != std::isinf(p.c_second)) {
      raise(ErrorCode::incompatible_forms, name + ": primary and inverse forms disagree at t = " + std::to_string(ts[i]));
    }
    merged[i].c = std::max(p.c_primary, p.c_second);
    primary.push_back(num_or_null(p.c_primary));
    second.push_back(num_or_null(p.c_second));
  }
  auto profile = [&](double t) {
    const auto p = bk_point(sh, t);
    return p.divergent ? kInf : std::max(p.c_primary, p.c_second);
  };
  summarize(rep, "t", ts, merged, profile);
  if (rep.status == Status::divergent) return rep;
  rep.details["c_primary_form"] = primary;
  rep.details["c_inverse_form"] = second;
  rep.details["forms_agree"] = true;
  if (rep.holds()) {
    const double t = rep.details["argmax"]["t"].get<double>();
    const auto p = bk_point(sh, t);
    const double c2 = 2.0 * rep.c_min;
    rep.details["monotone_check"] =
        bk_primary_lhs(sh, p.tail, t, c2) <= p.tail && bk_second_lhs(sh, p.tail, t, c2) <= c2;
  }
  return rep;
}

std::vector<double> tail_breaks_for(const YoungFunction& phi, double exponent) {
  // s with s^exponent equal to a density breakpoint of phi
  std::vector<double> out;
  if (exponent == 0.0) return out;
  for (double b : phi.t_breaks()) out.push_back(std::pow(b, 1.0 / exponent));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

double alpha_Pp(const YoungFunction& phi1, double p, double gamma, double t) {
  if (p == 0.0) raise(ErrorCode::invalid_argument, "p must be nonzero");
  const double e = -1.0 / p;
  auto f = [&](double s) {
    const double v = phi1.Phi(std::pow(s, e));
    return v == 0.0 ? 0.0 : v * std::pow(s, gamma);
  };
  try {
    return quad::integrate_to_infinity(f, t, tail_breaks_for(phi1, e), inner_opts());
  } catch (const Error& err) {
    if (err.code() != ErrorCode::divergent_integral) throw;
    raise(ErrorCode::divergent_alpha, "alpha(" + fmt(t) + ") diverges");
  }
}

ConditionReport check_bk_Pp_inv(const YoungFunction& phi1, const YoungFunction& phi2, double inv_p, double gamma,
                                const LogGrid& grid) {
  if (gamma == -1.0) raise(ErrorCode::invalid_argument, "gamma = -1 is excluded");
  BkShape sh;
  const double e = -inv_p;
  sh.tail_f = [&phi1, e, gamma](double s) {
    const double v = phi1.Phi(std::pow(s, e));
    return v == 0.0 ? 0.0 : v * std::pow(s, gamma);
  };
  sh.tail_breaks = tail_breaks_for(phi1, e);
  if (phi2.kind() != YoungKind::young) {
    // A divergent alpha is reported before Psi2 is needed.
    grid.validate();
    bool divergent = false;
    try {
      tail_integral(sh, grid.hi);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::divergent_integral) throw;
      divergent = true;
    }
    if (!divergent) raise(ErrorCode::not_young, phi2.spec() + " is not a Young function");
  }
  const YoungFunction psi2 = phi2.kind() == YoungKind::young ? phi2.complementary() : phi2;
  sh.G = [&psi2](double x) { return psi2.Phi(x); };
  sh.G_levels = psi2.t_breaks();
  sh.g = [&phi2](double x) { return phi2.phi_inv(x); };
  sh.g_levels = phi2.y_breaks();
  sh.e1 = 1.0 - inv_p + gamma;
  sh.e2 = inv_p - 1.0;
  sh.gamma = gamma;
  json params = {{"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"inv_p", inv_p}, {"gamma", gamma}};
  if (inv_p != 0.0) params["p"] = 1.0 / inv_p;
  auto rep = run_bk("bk-p", params, sh, grid, "alpha");
  if (std::abs(sh.e1) < 1e-12)
    rep.details["note"] = "1 - 1/p + gamma = 0 is an excluded value for the equivalence; checked as stated";
  return rep;
}

ConditionReport check_bk_Pp(const YoungFunction& phi1, const YoungFunction& phi2, double p, double gamma,
                            const LogGrid& grid) {
  if (p == 0.0 || !std::isfinite(p)) raise(ErrorCode::invalid_argument, "p must be finite and nonzero");
  return check_bk_Pp_inv(phi1, phi2, 1.0 / p, gamma, grid);
}

double beta_Qq(const YoungFunction& phi2, double q, double gamma, double t) {
  if (q == 0.0) raise(ErrorCode::invalid_argument, "q must be nonzero");
  const YoungFunction psi2 = phi2.complementary();
  const double e = 1.0 / q - 1.0 - gamma;
  auto f = [&](double s) {
    const double v = psi2.Phi(std::pow(s, e));
    return v == 0.0 ? 0.0 : v * std::pow(s, gamma);
  };
  try {
    return quad::integrate_to_infinity(f, t, tail_breaks_for(psi2, e), inner_opts());
  } catch (const Error& err) {
    if (err.code() != ErrorCode::divergent_integral) throw;
    raise(ErrorCode::divergent_beta, "beta(" + fmt(t) + ") diverges");
  }
}

ConditionReport check_bk_Qq(const YoungFunction& phi1, const YoungFunction& phi2, double q, double gamma,
                            const LogGrid& grid) {
  if (q == 0.0 || !std::isfinite(q)) raise(ErrorCode::invalid_argument, "q must be finite and nonzero");
  if (gamma == -1.0) raise(ErrorCode::invalid_argument, "gamma = -1 is excluded");
  if (phi1.kind() != YoungKind::young) raise(ErrorCode::not_young, phi1.spec() + " is not a Young function");
  const YoungFunction psi2 = phi2.complementary();
  BkShape sh;
  const double e = 1.0 / q - 1.0 - gamma;
  sh.tail_f = [&psi2, e, gamma](double s) {
    const double v = psi2.Phi(std::pow(s, e));
    return v == 0.0 ? 0.0 : v * std::pow(s, gamma);
  };
  sh.tail_breaks = tail_breaks_for(psi2, e);
  sh.G = [&phi1](double x) { return phi1.Phi(x); };
  sh.G_levels = phi1.t_breaks();
  sh.g = [&phi1](double x) { return phi1.phi(x); };
  sh.g_levels = phi1.t_breaks();
  sh.e1 = 1.0 / q;
  sh.e2 = gamma - 1.0 / q;
  sh.gamma = gamma;
  sh.tail_error = ErrorCode::divergent_beta;
  json params = {{"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"q", q}, {"gamma", gamma}};
  return run_bk("bk-q", params, sh, grid, "beta");
}

ConditionReport check_bk_Pp_remark(const YoungFunction& phi1, const YoungFunction& phi2, double p, double gamma,
                                   const LogGrid& grid) {
  if (p == 0.0 || !std::isfinite(p)) raise(ErrorCode::invalid_argument, "p must be finite and nonzero");
  const double b = 1.0 - 1.0 / p + gamma;
  enum class Regime { flat, above, below };
  Regime regime;
  if (std::abs(b) < 1e-12 && p > 0.0)
    regime = Regime::flat;
  else if (p > 0.0 && b > 0.0)
    regime = Regime::above;
  else if (p < 0.0 && b < 0.0)
    regime = Regime::below;
  else
    raise(ErrorCode::regime_unsupported, "p = " + fmt(p) + ", gamma = " + fmt(gamma) + " matches no supported regime");
  grid.validate();
  phi2.complementary();  // Phi2 must be a Young function

  const double pb = (1.0 + gamma) * p - 1.0;
  const double ey = -(1.0 + gamma) * p - 1.0;
  const auto levels = phi1.t_breaks();
  auto substituted_alpha = [&](double t) {
    auto f = [&](double y) {
      const double v = phi1.Phi(y);
      return v == 0.0 ? 0.0 : v * std::pow(y, ey);
    };
    const double edge = std::pow(t, -1.0 / p);
    try {
      if (p > 0.0) return p * quad::integrate_from_zero(f, edge, levels, inner_opts());
      return -p * quad::integrate_to_infinity(f, edge, levels, inner_opts());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_integral) throw;
      raise(ErrorCode::divergent_alpha, "alpha(" + fmt(t) + ") diverges");
    }
  };
  const auto ylev = phi2.y_breaks();
  auto holds_at = [&](double alpha, double t, double C) {
    if (regime == Regime::flat) return p * phi2.phi_inv(alpha / C) <= C * std::pow(t, -1.0 / p);
    const double lam = alpha * std::pow(t, -b);
    const double rhs = C * std::abs(b) * std::pow(alpha, -1.0 / pb);
    auto f = [&](double y) { return phi2.phi_inv(y / C) * std::pow(y, -(1.0 + gamma) / b); };
    std::vector<double> br;
    for (double y : ylev) br.push_back(C * y);
    const double lhs = regime == Regime::above ? safe_to_infinity(f, lam, br) : safe_from_zero(f, lam, br);
    return lhs <= rhs;
  };

  ConditionReport rep;
  rep.condition = "bk-p-remark";
  rep.params = {{"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"p", p}, {"gamma", gamma}};
  rep.grid = grid_json(grid, "t");
  rep.tolerances = tolerance_json();
  rep.details["regime"] = regime == Regime::flat ? "1-1/p+gamma=0" : regime == Regime::above ? "p>0,1-1/p+gamma>0"
                                                                                            : "p<0,1-1/p+gamma<0";
  const auto ts = grid.values();
  struct R {
    Point pt;
    double alpha_direct = 0.0, alpha_sub = 0.0;
  };
  auto eval = [&](double t) {
    R r;
    try {
      r.alpha_sub = substituted_alpha(t);
      r.alpha_direct = alpha_Pp(phi1, p, gamma, t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_alpha) throw;
      r.pt = {kInf, true, "alpha(t) diverges"};
      return r;
    }
    if (r.alpha_sub == 0.0) {
      r.pt.c = search_defaults().lo;
      return r;
    }
    r.pt.c = minimal_constant([&](double C) { return holds_at(r.alpha_sub, t, C); });
    return r;
  };
  const auto rs = parallel_map<R>(ts.size(), [&](std::size_t i) { return eval(ts[i]); });
  std::vector<Point> pts;
  double worst = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    pts.push_back(rs[i].pt);
    if (!rs[i].pt.divergent && rs[i].alpha_direct > 0.0)
      worst = std::max(worst, std::abs(rs[i].alpha_sub / rs[i].alpha_direct - 1.0));
  }
  if (worst > 1e-6) raise(ErrorCode::incompatible_forms, "substituted alpha disagrees with direct alpha");
  rep.details["alpha_rel_deviation"] = worst;
  summarize(rep, "t", ts, pts, [&](double t) { return eval(t).pt.c; });
  return rep;
}

double averaged_inverse(const YoungFunction& phi, double gamma, double t) {
  if (!(t > 0.0)) raise(ErrorCode::invalid_argument, "t must be positive");
  if (gamma == 0.0) return phi.phi_inv(1.0);
  auto f = [&](double s) { return phi.phi_inv(std::pow(s, -gamma)); };
  std::vector<double> br;
  for (double y : phi.y_breaks()) {
    const double s = std::pow(y, -1.0 / gamma);
    if (s > 0.0 && s < t) br.push_back(s);
  }
  return safe_from_zero(f, t, br) / t;
}

namespace {

json delta2_json(const Delta2Report& d) {
  json j = {{"status", d.holds ? "holds" : "fails"}, {"threshold", d.threshold}};
  if (d.holds)
    j["c_min"] = d.c_min;
  else
    j["witness"] = {{"t", d.witness_t}, {"ratio", num_or_null(d.worst_ratio)}};
  return j;
}

// Pointwise constants for avg(t) <= C^outer phi^-1(C t^-gamma).
ConditionReport averaged_clause(const YoungFunction& phi, double gamma, const LogGrid& grid, bool outer_c,
                                const char* name) {
  ConditionReport rep;
  rep.condition = name;
  rep.grid = grid_json(grid, "t");
  rep.tolerances = tolerance_json();
  const auto ts = grid.values();
  auto eval = [&](double t) {
    Point pt;
    const double avg = averaged_inverse(phi, gamma, t);
    if (std::isinf(avg)) {
      pt.c = kInf;
      pt.reason = "int_0^t phi^-1(s^-gamma) ds diverges at s = 0";
      return pt;
    }
    const double tg = std::pow(t, -gamma);
    pt.c = minimal_constant([&](double C) { return avg <= (outer_c ? C : 1.0) * phi.phi_inv(C * tg); });
    return pt;
  };
  const auto pts = parallel_map<Point>(ts.size(), [&](std::size_t i) { return eval(ts[i]); });
  summarize(rep, "t", ts, pts, [&](double t) { return eval(t).c; });
  return rep;
}

ConditionReport combine(ConditionReport rep, const std::vector<std::pair<std::string, ConditionReport>>& parts,
                        const std::vector<std::pair<std::string, Delta2Report>>& d2) {
  rep.status = Status::holds;
  rep.c_min = 0.0;
  for (const auto& [name, d] : d2) {
    rep.details[name] = delta2_json(d);
    if (!d.holds && rep.status == Status::holds) {
      rep.status = Status::fails;
      rep.witness = {{"clause", name}, {"t", d.witness_t}, {"ratio", num_or_null(d.worst_ratio)}};
    }
    if (d.holds) rep.c_min = std::max(rep.c_min, d.c_min);
  }
  for (const auto& [name, r] : parts) {
    json j = {{"status", to_string(r.status)}};
    if (r.holds())
      j["c_min"] = r.c_min;
    else
      j["witness"] = r.witness;
    rep.details[name] = j;
    if (!r.holds() && rep.status == Status::holds) {
      rep.status = r.status;
      rep.witness = r.witness;
      rep.witness["clause"] = name;
    }
    if (r.holds()) rep.c_min = std::max(rep.c_min, r.c_min);
    if (rep.values.empty()) rep.values = r.values;
  }
  if (!rep.holds()) rep.c_min = 0.0;
  return rep;
}

}  // namespace

ConditionReport check_maximal_condition(const YoungFunction& phi, double gamma, const LogGrid& grid) {
  if (!(gamma > -1.0)) raise(ErrorCode::invalid_argument, "maximal condition needs gamma > -1");
  grid.validate();
  const YoungFunction psi = phi.complementary();
  ConditionReport rep;
  rep.condition = "maximal";
  rep.params = {{"phi", phi.spec()}, {"gamma", gamma}};
  rep.grid = grid_json(grid, "t");
  rep.tolerances = tolerance_json();
  const auto d2 = check_delta2(psi, grid);
  std::vector<std::pair<std::string, ConditionReport>> parts;
  if (gamma >= 0.0)
    parts.emplace_back("averaged_inverse", averaged_clause(phi, gamma, grid, true, "maximal-averaged-inverse"));
  else
    rep.details["averaged_inverse"] = {{"status", "holds"}, {"vacuous", true}};
  return combine(std::move(rep), parts, {{"delta2_psi", d2}});
}

ConditionReport check_hilbert_condition(const YoungFunction& phi, double gamma, const LogGrid& grid) {
  if (!(gamma > -1.0)) raise(ErrorCode::invalid_argument, "Hilbert condition needs gamma > -1");
  grid.validate();
  ConditionReport rep;
  rep.condition = "hilbert";
  rep.params = {{"phi", phi.spec()}, {"gamma", gamma}};
  rep.grid = grid_json(grid, "t");
  rep.tolerances = tolerance_json();
  const auto d2_phi = check_delta2(phi, grid);
  if (!d2_phi.holds) return combine(std::move(rep), {}, {{"delta2_phi", d2_phi}});
  const YoungFunction psi = phi.complementary();
  const auto d2_psi = check_delta2(psi, grid);
  std::vector<std::pair<std::string, ConditionReport>> parts;
  if (gamma > 0.0)
    parts.emplace_back("averaged_inverse", averaged_clause(phi, gamma, grid, false, "hilbert-averaged-inverse"));
  else
    rep.details["averaged_inverse"] = {{"status", "holds"}, {"vacuous", true}};
  return combine(std::move(rep), parts, {{"delta2_phi", d2_phi}, {"delta2_psi", d2_psi}});
}

ConditionReport check_aphi_power(const YoungFunction& phi, double gamma, const LogGrid& grid) {
  if (!(gamma > 0.0)) raise(ErrorCode::invalid_argument, "power A_phi needs gamma > 0");
  if (phi.kind() != YoungKind::young) raise(ErrorCode::not_young, phi.spec() + " is not a Young function");
  grid.validate();
  ConditionReport rep;
  rep.condition = "aphi";
  rep.params = {{"phi", phi.spec()}, {"gamma", gamma}};
  rep.grid = grid_json(grid, "t2");
  rep.grid["t1"] = "0 and every grid point <= t2";
  rep.tolerances = tolerance_json();
  const auto ts = grid.values();
  // I(t) = int_0^t phi^-1(s^-gamma) ds
  const auto I = parallel_map<double>(ts.size(), [&](std::size_t i) { return averaged_inverse(phi, gamma, ts[i]) * ts[i]; });
  auto pair_c = [&](double t1, double i1, double t2, double i2) {
    const double lhs = (i1 + i2) / (t1 + t2);
    const double tg = std::pow(t2, -gamma);
    return minimal_constant([&](double C) { return lhs <= phi.phi_inv(C * tg); });
  };
  struct Best {
    Point pt;
    double t1 = 0.0;
  };
  auto best_for = [&](double t2, double i2, std::size_t upto) {
    Best b;
    if (std::isinf(i2)) {
      b.pt = {kInf, false, "int_0^t phi^-1(s^-gamma) ds diverges at s = 0"};
      return b;
    }
    b.pt.c = pair_c(0.0, 0.0, t2, i2);
    const double same = pair_c(t2, i2, t2, i2);
    if (same > b.pt.c) {
      b.pt.c = same;
      b.t1 = t2;
    }
    for (std::size_t j = 0; j < upto; ++j) {
      const double c = pair_c(ts[j], I[j], t2, i2);
      if (c > b.pt.c) {
        b.pt.c = c;
        b.t1 = ts[j];
      }
    }
    return b;
  };
  const auto best = parallel_map<Best>(ts.size(), [&](std::size_t i) { return best_for(ts[i], I[i], i); });
  std::vector<Point> pts;
  for (const auto& b : best) pts.push_back(b.pt);
  auto profile = [&](double t2) {
    const std::size_t upto = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t2) - ts.begin());
    return best_for(t2, averaged_inverse(phi, gamma, t2) * t2, upto).pt.c;
  };
  summarize(rep, "t2", ts, pts, profile);
  if (rep.status == Status::fails && rep.witness.contains("t2")) {
    const double t2 = rep.witness["t2"].get<double>();
    const std::size_t upto = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t2) - ts.begin());
    rep.witness["t1"] = best_for(t2, averaged_inverse(phi, gamma, t2) * t2, upto).t1;
  }
  if (rep.holds()) {
    const double t2 = rep.details["argmax"]["t2"].get<double>();
    rep.details["monotone_check"] = averaged_inverse(phi, gamma, t2) <= phi.phi_inv(2.0 * rep.c_min * std::pow(t2, -gamma));
  }
  return rep;
}

std::vector<Interval> default_shapes() { return {{0.0, 1.0}, {-1.0, 1.0}, {0.5, 1.0}, {-0.5, 1.0}, {1.0, 2.0}}; }

namespace {

// int over q of phi^-1(A / w(x)) dx. For gamma > 0 the part near 0 is mapped
// through y = A / w(r):
//   int_0^h = (1/gamma) (A/c)^(1/gamma) int_{A/w(h)}^inf phi^-1(y) y^(-1/gamma-1) dy,
// and the tail from y = 1 is computed once.
class RadialInverse {
 public:
  RadialInverse(const YoungFunction& phi, const PowerWeight& w) : phi_(phi), w_(w), levels_(phi.y_breaks()) {
    if (w_.gamma > 0.0) tail1_ = safe_to_infinity([this](double y) { return g(y); }, 1.0, levels_);
  }

  double operator()(double A, Interval q) const {
    const auto br = radial_breaks(A);
    auto F = [&](double r) { return phi_.phi_inv(A / w_(r)); };
    auto piece = [&](double lo, double hi) {
      if (!(hi > lo)) return 0.0;
      std::vector<double> in;
      for (double r : br)
        if (r > lo && r < hi) in.push_back(r);
      if (lo > 0.0) return quad::integrate(F, lo, hi, in, inner_opts());
      if (w_.gamma > 0.0) {
        const double v = from_zero(A, hi);
        if (!std::isnan(v)) return v;
      }
      return safe_from_zero(F, hi, in);
    };
    if (q.a >= 0.0) return piece(q.a, q.b);
    if (q.b <= 0.0) return piece(-q.b, -q.a);
    const double m = std::min(-q.a, q.b), M = std::max(-q.a, q.b);
    return 2.0 * piece(0.0, m) + piece(m, M);
  }

 private:
  double g(double y) const { return phi_.phi_inv(y) * std::pow(y, -1.0 / w_.gamma - 1.0); }

  // NaN when the prefactor leaves the double range.
  double from_zero(double A, double h) const {
    if (std::isinf(tail1_)) return kInf;
    const double pre = std::pow(A / w_.coeff, 1.0 / w_.gamma) / w_.gamma;
    if (!(pre > 0.0) || std::isinf(pre)) return std::nan("");
    const double yh = A / w_(h);
    auto G = [this](double y) { return g(y); };
    double t;
    if (yh < 1.0) {
      std::vector<double> cuts = levels_;
      for (double y = 1.0 / 16.0; y > yh; y /= 16.0) cuts.push_back(y);
      t = tail1_ + quad::integrate(G, yh, 1.0, cuts, inner_opts());
    } else {
      t = safe_to_infinity(G, yh, levels_);
    }
    return pre * t;
  }

  // |x| at which A / w(x) equals each level.
  std::vector<double> radial_breaks(double A) const {
    std::vector<double> out;
    if (w_.gamma == 0.0) return out;
    for (double y : levels_) out.push_back(std::pow(A / (w_.coeff * y), 1.0 / w_.gamma));
    return out;
  }

  const YoungFunction& phi_;
  PowerWeight w_;
  std::vector<double> levels_;
  double tail1_ = 0.0;
};

double aphi_value(const YoungFunction& phi, const PowerWeight& w, const RadialInverse& R, Interval q, double eps) {
  if (!(q.b > q.a)) raise(ErrorCode::invalid_argument, "interval needs a < b");
  const double len = q.b - q.a;
  const double wq = w.measure(q.a, q.b);
  const double integral = R(1.0 / eps, q);
  if (std::isinf(integral)) return kInf;
  return eps * wq / len * phi.phi(integral / len);
}

json interval_json(Interval q) { return {q.a, q.b}; }

}  // namespace

double aphi_quantity(const YoungFunction& phi, const PowerWeight& w, Interval q, double eps) {
  return aphi_value(phi, w, RadialInverse(phi, w), q, eps);
}

nlohmann::json to_json(const PowerWeight& w) {
  return {{"gamma", w.gamma}, {"coeff", w.coeff}, {"domain", to_string(w.domain)}};
}

namespace {

// Per-shape growth: a blow-up along one interval shape can hide below the
// envelope of the others.
void shape_growth(ConditionReport& rep, const char* var, const std::vector<double>& xs,
                  const std::vector<std::vector<double>>& per_shape,
                  const std::function<double(std::size_t, double)>& profile,
                  const std::function<json(std::size_t, double)>& interval_at) {
  if (!rep.holds()) return;
  for (std::size_t k = 0; k < per_shape.size(); ++k) {
    const auto g = detect_growth(xs, per_shape[k], [&](double x) { return profile(k, x); });
    if (!g.unbounded) continue;
    json peaks = json::array();
    for (std::size_t i = g.run_begin; i <= g.run_end; ++i) peaks.push_back({{var, g.peak_x[i]}, {"c", g.peak_c[i]}});
    const double x = g.peak_x[g.witness];
    rep.status = Status::fails;
    rep.c_min = 0.0;
    rep.witness = {{var, x}, {"c", g.peak_c[g.witness]}, {"rule", "unbounded-growth"}, {"peaks", peaks},
                   {"interval", interval_at(k, x)}};
    rep.details.erase("argmax");
    return;
  }
}

}  // namespace

ConditionReport check_aphi_general(const YoungFunction& phi, const PowerWeight& w0,
                                   const std::vector<Interval>& intervals, const LogGrid& grid) {
  if (!(w0.gamma > -1.0)) raise(ErrorCode::divergent_integral, "w(Q) is infinite for gamma <= -1");
  if (phi.kind() != YoungKind::young) raise(ErrorCode::not_young, phi.spec() + " is not a Young function");
  grid.validate();
  PowerWeight w = w0;
  w.domain = Domain::line;
  const bool explicit_q = !intervals.empty();
  const bool scan_eps = explicit_q || w.gamma == 0.0;
  const auto shapes = explicit_q ? intervals : default_shapes();
  ConditionReport rep;
  rep.condition = "aphi-general";
  rep.params = {{"phi", phi.spec()}, {"weight", to_json(w)}};
  json qs = json::array();
  for (auto q : shapes) qs.push_back(interval_json(q));
  rep.params["intervals"] = qs;
  const char* var = scan_eps ? "eps" : "scale";
  rep.grid = grid_json(grid, var);
  rep.tolerances = tolerance_json();
  const auto xs = grid.values();
  const std::size_t n = xs.size(), m = shapes.size();
  auto at = [&](std::size_t k, double x) {
    Interval q = shapes[k];
    if (!scan_eps) q = {q.a * x, q.b * x};
    return q;
  };
  const RadialInverse R(phi, w);
  auto value = [&](std::size_t k, double x) {
    const double v = aphi_value(phi, w, R, at(k, x), scan_eps ? x : 1.0);
    return std::isnan(v) ? kInf : v;
  };
  const auto flat = parallel_map<double>(n * m, [&](std::size_t i) { return value(i % m, xs[i / m]); });
  std::vector<std::vector<double>> per_shape(m, std::vector<double>(n));
  std::vector<Point> pts(n);
  std::vector<std::size_t> arg_shape(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const double v = flat[i * m + k];
      per_shape[k][i] = v;
      if (v > pts[i].c) {
        pts[i].c = v;
        arg_shape[i] = k;
      }
    }
  for (auto& p : pts)
    if (std::isinf(p.c)) p.reason = "average of phi^-1(1/(eps w)) diverges";
  auto envelope = [&](double x) {
    double c = 0.0;
    for (std::size_t k = 0; k < m; ++k) c = std::max(c, value(k, x));
    return c;
  };
  summarize(rep, var, xs, pts, envelope);
  auto interval_at = [&](std::size_t k, double x) { return interval_json(at(k, x)); };
  if (rep.status == Status::fails && rep.witness.contains(var)) {
    const double x = rep.witness[var].get<double>();
    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (value(j, x) > value(k, x)) k = j;
    rep.witness["interval"] = interval_at(k, x);
    rep.witness["eps"] = scan_eps ? x : 1.0;
  }
  shape_growth(rep, var, xs, per_shape, value, interval_at);
  if (rep.status == Status::fails && !scan_eps) rep.witness["eps"] = 1.0;
  if (!scan_eps) rep.details["reduction"] = "power weight: eps = 1 with dilated intervals";
  return rep;
}

ConditionReport check_bk_general(const YoungFunction& phi, const PowerWeight& w0,
                                 const std::vector<Interval>& intervals, const LogGrid& lambda_grid) {
  if (!(w0.gamma > -1.0)) raise(ErrorCode::divergent_integral, "w(Q) is infinite for gamma <= -1");
  if (phi.kind() != YoungKind::young) raise(ErrorCode::not_young, phi.spec() + " is not a Young function");
  lambda_grid.validate();
  PowerWeight w = w0;
  w.domain = Domain::line;
  const auto shapes = intervals.empty() ? default_shapes() : intervals;
  ConditionReport rep;
  rep.condition = "bk-general";
  rep.params = {{"phi", phi.spec()}, {"weight", to_json(w)}};
  json qs = json::array();
  for (auto q : shapes) qs.push_back(interval_json(q));
  rep.params["intervals"] = qs;
  rep.grid = grid_json(lambda_grid, "lambda");
  rep.tolerances = tolerance_json();
  const RadialInverse R(phi, w);
  auto value = [&](std::size_t k, double lambda) {
    const Interval q = shapes[k];
    const double len = q.b - q.a;
    const double K = phi.phi(lambda) * w.measure(q.a, q.b) / len;
    return minimal_constant([&](double C) {
      const double avg = R(K / C, q) / len;
      return avg <= C * lambda;
    });
  };
  // Points where phi(lambda) / (C w) can overflow a double cannot be evaluated.
  const double limit = std::numeric_limits<double>::max() * 1e-20;
  std::vector<double> xs;
  json skipped = json::array();
  for (double x : lambda_grid.values()) {
    if (phi.phi(x) <= limit)
      xs.push_back(x);
    else
      skipped.push_back(x);
  }
  const std::size_t n = xs.size(), m = shapes.size();
  const auto flat = parallel_map<double>(n * m, [&](std::size_t i) { return value(i % m, xs[i / m]); });
  std::vector<std::vector<double>> per_shape(m, std::vector<double>(n));
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      per_shape[k][i] = flat[i * m + k];
      pts[i].c = std::max(pts[i].c, flat[i * m + k]);
    }
  auto envelope = [&](double x) {
    double c = 0.0;
    for (std::size_t k = 0; k < m; ++k) c = std::max(c, value(k, x));
    return c;
  };
  summarize(rep, "lambda", xs, pts, envelope);
  auto interval_at = [&](std::size_t k, double) { return interval_json(shapes[k]); };
  if (rep.status == Status::fails && rep.witness.contains("lambda")) {
    const double x = rep.witness["lambda"].get<double>();
    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (value(j, x) > value(k, x)) k = j;
    rep.witness["interval"] = interval_at(k, x);
  }
  shape_growth(rep, "lambda", xs, per_shape, value, interval_at);
  if (!skipped.empty()) rep.details["unrepresentable_lambda"] = skipped;
  if (intervals.empty()) rep.details["reduction"] = "power weight: condition is dilation invariant";
  return rep;
}

double alpha_fourweight(const YoungFunction& phi1, const FourWeights& W, double lambda, double x) {
  auto f = [&](double y) {
    const double v = phi1.Phi(lambda * W.w(y));
    return v == 0.0 ? 0.0 : v * W.t(y);
  };
  try {
    return quad::integrate_to_infinity(f, x, {}, inner_opts());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::divergent_integral) throw;
    raise(ErrorCode::divergent_alpha, "alpha(" + fmt(lambda) + ", " + fmt(x) + ") diverges");
  }
}

ConditionReport check_fourweight_condition(const YoungFunction& phi1, const YoungFunction& phi2, const FourWeights& W,
                                           const LogGrid& x_grid, const LogGrid& lambda_grid) {
  x_grid.validate();
  lambda_grid.validate();
  const YoungFunction psi2 = phi2.complementary();
  ConditionReport rep;
  rep.condition = "fourweight";
  rep.params = {{"phi1", phi1.spec()},
                {"phi2", phi2.spec()},
                {"t", to_json(W.t)},
                {"u", to_json(W.u)},
                {"v", to_json(W.v)},
                {"w", to_json(W.w)}};
  rep.grid = grid_json(x_grid, "x");
  rep.grid["lambda"] = grid_json(lambda_grid, "lambda");
  rep.tolerances = tolerance_json();
  const auto xs = x_grid.values();
  const auto ls = lambda_grid.values();
  const double e_uv = W.u.gamma + W.v.gamma;
  const double cuv = W.u.coeff * W.v.coeff;
  struct Cell {
    double c_primary = 0.0, c_second = 0.0;
    bool divergent = false;
  };
  auto cell = [&](double lambda, double x) {
    Cell r;
    double alpha;
    try {
      alpha = alpha_fourweight(phi1, W, lambda, x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_alpha) throw;
      r.divergent = true;
      return r;
    }
    if (alpha == 0.0) {
      r.c_primary = r.c_second = search_defaults().lo;
      return r;
    }
    r.c_primary = form_constant([&](double C) {
      const double k = alpha / (C * lambda * cuv);
      auto f = [&](double y) { return psi2.Phi(k * std::pow(y, -e_uv)) * W.v(y); };
      return safe_from_zero(f, x, crossings(psi2.t_breaks(), k, e_uv, x)) <= alpha;
    });
    r.c_second = form_constant([&](double C) {
      const double k = alpha / (C * lambda * cuv);
      auto f = [&](double y) { return phi2.phi_inv(k * std::pow(y, -e_uv)) / W.u(y); };
      return safe_from_zero(f, x, crossings(phi2.y_breaks(), k, e_uv, x)) <= C * lambda;
    });
    return r;
  };
  const std::size_t nl = ls.size();
  const auto cells = parallel_map<Cell>(xs.size() * nl, [&](std::size_t i) { return cell(ls[i % nl], xs[i / nl]); });
  std::vector<Point> pts(xs.size());
  bool agree = true;
  json disagreements = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < nl; ++j) {
      const auto& c = cells[i * nl + j];
      if (c.divergent) {
        pts[i] = {kInf, true, "alpha(lambda, x) diverges at lambda = " + fmt(ls[j])};
        break;
      }
      if (std::isinf(c.c_primary) != std::isinf(c.c_second)) {
        agree = false;
        disagreements.push_back({{"x", xs[i]}, {"lambda", ls[j]}});
      }
      pts[i].c = std::max({pts[i].c, c.c_primary, c.c_second});
    }
  }
  if (!agree) raise(ErrorCode::incompatible_forms, "fourweight forms disagree: " + disagreements.dump());
  summarize(rep, "x", xs, pts, nullptr);
  rep.details["forms_agree"] = true;
  rep.details["cross_validated_points"] = xs.size() * nl;
  return rep;
}

double weight_ratio(double gamma, double a, double b) {
  const PowerWeight w{gamma, 1.0, Domain::line};
  const double m = std::max(std::abs(a), std::abs(b));
  return w.measure(a, b) / (b - a) / std::pow(m, gamma);
}

}  // namespace orliczkit
