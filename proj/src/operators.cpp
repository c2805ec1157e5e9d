#include "orliczkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orliczkit/errors.hpp"
#include "orliczkit/quadrature.hpp"
#include "orliczkit/simd/kernels.hpp"

namespace orliczkit {

double Term::operator()(double x) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::power:
      return c * std::pow(x, a);
    case Kind::log_ratio: {
      const double da = x - a, db = x - b;
      if (da == 0.0) return -c * kInf;
      if (db == 0.0) return c * kInf;
      if (std::abs(db) > std::abs(b - a)) return c * std::log1p((b - a) / db);
      if (std::abs(da) > std::abs(b - a)) return -c * std::log1p((a - b) / da);
      return c * std::log(std::abs(da) / std::abs(db));
    }
  }
  return 0.0;
}

PiecewiseClosedForm::PiecewiseClosedForm(std::vector<ClosedPiece> pieces, Domain domain)
    : pieces_(std::move(pieces)), domain_(domain) {}

double PiecewiseClosedForm::operator()(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](double v, const ClosedPiece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0.0;
  --it;
  if (!(x < it->hi) && !std::isinf(it->hi)) return 0.0;
  double net = 0.0;
  double sum = 0.0;
  for (const auto& t : it->terms) {
    if (t.kind == Term::Kind::log_ratio && (x == t.a || x == t.b)) {
      net += x == t.a ? t.c : -t.c;
      if (x == t.a) sum += -t.c * std::log(std::abs(x - t.b));
      if (x == t.b) sum += t.c * std::log(std::abs(x - t.a));
      continue;
    }
    sum += t(x);
  }
  if (net != 0.0) return net > 0.0 ? -kInf : kInf;
  return sum;
}

std::vector<double> PiecewiseClosedForm::breakpoints() const {
  std::vector<double> r;
  for (const auto& p : pieces_) {
    if (std::isfinite(p.lo)) r.push_back(p.lo);
    if (std::isfinite(p.hi)) r.push_back(p.hi);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

namespace {

void require_half_line(const StepFunction& f, const char* op) {
  for (const auto& p : f.pieces())
    if (p.a < 0.0) raise(ErrorCode::invalid_argument, std::string(op) + " acts on functions on r+");
}

// int_a^b s^(e-1) ds, e != 0, 0 <= a < b
double power_mass(double e, double a, double b) {
  if (a == 0.0) {
    if (e <= 0.0) raise(ErrorCode::divergent_integral, "kernel s^(1/p-1) not integrable at 0");
    return std::pow(b, e) / e;
  }
  return std::pow(a, e) * std::expm1(e * std::log1p((b - a) / a)) / e;
}

struct Cell {
  double lo, hi, c;
};

// Consecutive cells between breakpoints, with the value of f on each.
std::vector<Cell> cells(const StepFunction& f) {
  std::vector<Cell> out;
  const auto& ps = f.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i > 0 && ps[i].a > ps[i - 1].b) out.push_back({ps[i - 1].b, ps[i].a, 0.0});
    out.push_back({ps[i].a, ps[i].b, ps[i].c});
  }
  return out;
}

Term constant(double c) { return {Term::Kind::constant, c, 0.0, 0.0}; }
Term power(double c, double e) { return {Term::Kind::power, c, e, 0.0}; }

}  // namespace

PiecewiseClosedForm hardy_P(double p, const StepFunction& f) {
  if (p == 0.0 || !std::isfinite(p)) raise(ErrorCode::invalid_argument, "P_p needs p != 0");
  require_half_line(f, "P_p");
  const double e = 1.0 / p;
  std::vector<ClosedPiece> out;
  const auto cs = cells(f);
  if (cs.empty()) return PiecewiseClosedForm({{0.0, kInf, {}}}, Domain::half_line);
  if (cs.front().lo > 0.0) out.push_back({0.0, cs.front().lo, {}});
  double acc = 0.0;  // int_0^lo f(s) s^(e-1) ds
  for (const auto& c : cs) {
    ClosedPiece piece{c.lo, c.hi, {}};
    if (c.c != 0.0) {
      // t^-e (acc + c (t^e - lo^e) / e)
      const double base = c.lo == 0.0 ? 0.0 : c.c * std::pow(c.lo, e) / e;
      if (c.lo == 0.0 && e <= 0.0) raise(ErrorCode::divergent_integral, "kernel s^(1/p-1) not integrable at 0");
      piece.terms.push_back(constant(c.c / e));
      if (acc - base != 0.0) piece.terms.push_back(power(acc - base, -e));
      acc += c.c * power_mass(e, c.lo, c.hi);
    } else if (acc != 0.0) {
      piece.terms.push_back(power(acc, -e));
    }
    out.push_back(std::move(piece));
  }
  ClosedPiece tail{cs.back().hi, kInf, {}};
  if (acc != 0.0) tail.terms.push_back(power(acc, -e));
  out.push_back(std::move(tail));
  return PiecewiseClosedForm(std::move(out), Domain::half_line);
}

PiecewiseClosedForm hardy_Q(double q, const StepFunction& f) {
  if (q == 0.0 || !std::isfinite(q)) raise(ErrorCode::invalid_argument, "Q_q needs q != 0");
  require_half_line(f, "Q_q");
  const double e = 1.0 / q;
  const auto cs = cells(f);
  if (cs.empty()) return PiecewiseClosedForm({{0.0, kInf, {}}}, Domain::half_line);
  std::vector<ClosedPiece> rev;
  rev.push_back({cs.back().hi, kInf, {}});
  double acc = 0.0;  // int_hi^inf f(s) s^(e-1) ds
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
    ClosedPiece piece{it->lo, it->hi, {}};
    if (it->c != 0.0) {
      // t^-e (acc + c (hi^e - t^e) / e)
      piece.terms.push_back(constant(-it->c / e));
      const double k = acc + it->c * std::pow(it->hi, e) / e;
      if (k != 0.0) piece.terms.push_back(power(k, -e));
      if (it->lo > 0.0) acc += it->c * power_mass(e, it->lo, it->hi);
    } else if (acc != 0.0) {
      piece.terms.push_back(power(acc, -e));
    }
    rev.push_back(std::move(piece));
  }
  if (cs.front().lo > 0.0) {
    ClosedPiece head{0.0, cs.front().lo, {}};
    if (acc != 0.0) head.terms.push_back(power(acc, -e));
    rev.push_back(std::move(head));
  }
  std::reverse(rev.begin(), rev.end());
  return PiecewiseClosedForm(std::move(rev), Domain::half_line);
}

PiecewiseClosedForm integral_I(const StepFunction& f) {
  require_half_line(f, "I");
  const auto cs = cells(f);
  if (cs.empty()) return PiecewiseClosedForm({{0.0, kInf, {}}}, Domain::half_line);
  std::vector<ClosedPiece> out;
  if (cs.front().lo > 0.0) out.push_back({0.0, cs.front().lo, {}});
  double acc = 0.0;
  for (const auto& c : cs) {
    ClosedPiece piece{c.lo, c.hi, {}};
    if (acc - c.c * c.lo != 0.0) piece.terms.push_back(constant(acc - c.c * c.lo));
    if (c.c != 0.0) piece.terms.push_back(power(c.c, 1.0));
    acc += c.c * (c.hi - c.lo);
    out.push_back(std::move(piece));
  }
  ClosedPiece tail{cs.back().hi, kInf, {}};
  if (acc != 0.0) tail.terms.push_back(constant(acc));
  out.push_back(std::move(tail));
  return PiecewiseClosedForm(std::move(out), Domain::half_line);
}

LevelSet level_set_I(const StepFunction& f, double lambda) {
  require_half_line(f, "I");
  if (lambda < 0.0) return {false, 0.0};
  double acc = 0.0;
  for (const auto& c : cells(f)) {
    if (c.c < 0.0) raise(ErrorCode::invalid_argument, "level sets of I need f >= 0");
    const double next = acc + c.c * (c.hi - c.lo);
    if (next > lambda) return {false, c.lo + (lambda - acc) / c.c};
    acc = next;
  }
  return {};
}

PiecewiseClosedForm hilbert(const StepFunction& f) {
  std::vector<Term> terms;
  for (const auto& p : f.pieces())
    if (p.c != 0.0) terms.push_back({Term::Kind::log_ratio, p.c / M_PI, p.a, p.b});
  auto knots = f.breakpoints();
  std::vector<ClosedPiece> out;
  double lo = -kInf;
  for (double k : knots) {
    out.push_back({lo, k, terms});
    lo = k;
  }
  out.push_back({lo, kInf, terms});
  return PiecewiseClosedForm(std::move(out), Domain::line);
}

MaximalFunction::MaximalFunction(const StepFunction& f) : f_(f.abs()), knots_(f.breakpoints()) {
  F_.reserve(knots_.size());
  for (double k : knots_) F_.push_back(primitive(k));
}

double MaximalFunction::primitive(double x) const {
  double s = 0.0;
  for (const auto& p : f_.pieces()) {
    if (x <= p.a) break;
    s += p.c * (std::min(x, p.b) - p.a);
  }
  return s;
}

double MaximalFunction::operator()(double x) const {
  if (knots_.empty()) return 0.0;
  const double fx = primitive(x);
  const auto split = std::lower_bound(knots_.begin(), knots_.end(), x) - knots_.begin();
  const auto n = static_cast<std::ptrdiff_t>(knots_.size());
  // right endpoints: x, then knots >= x
  std::vector<double> v{x}, fv{fx};
  for (auto j = split; j < n; ++j)
    if (knots_[j] > x) {
      v.push_back(knots_[j]);
      fv.push_back(F_[j]);
    }
  double best = f_.value(x);
  std::span<const double> vs(v), fvs(fv);
  for (std::ptrdiff_t i = 0; i <= split && i < n; ++i) {
    if (knots_[i] < x) best = std::max(best, simd::max_chord_slope(vs, fvs, knots_[i], F_[i]));
  }
  if (v.size() > 1) best = std::max(best, simd::max_chord_slope(vs.subspan(1), fvs.subspan(1), x, fx));
  return best;
}

MaximalFunction maximal(const StepFunction& f) { return MaximalFunction(f); }

std::string OperatorSpec::tag() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case OpKind::P: os << "P:p=" << param; break;
    case OpKind::Q: os << "Q:q=" << param; break;
    case OpKind::I: os << "I"; break;
    case OpKind::M: os << "M"; break;
    case OpKind::H: os << "H"; break;
  }
  return os.str();
}

OperatorSpec parse_operator(std::string_view text) {
  if (text == "I") return {OpKind::I, 0.0};
  if (text == "M") return {OpKind::M, 0.0};
  if (text == "H") return {OpKind::H, 0.0};
  auto param = [&](std::string_view prefix) {
    const std::string rest(text.substr(prefix.size()));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (rest.empty() || end != rest.c_str() + rest.size() || v == 0.0 || !std::isfinite(v))
      raise(ErrorCode::parse_error, "bad operator parameter in '" + std::string(text) + "'");
    return v;
  };
  if (text.rfind("P:p=", 0) == 0) return {OpKind::P, param("P:p=")};
  if (text.rfind("Q:q=", 0) == 0) return {OpKind::Q, param("Q:q=")};
  raise(ErrorCode::parse_error, "operator must be P:p=<r>, Q:q=<r>, I, M or H");
}

std::shared_ptr<const OperatorOutput> apply(const OperatorSpec& op, const StepFunction& f) {
  switch (op.kind) {
    case OpKind::P: return std::make_shared<PiecewiseClosedForm>(hardy_P(op.param, f));
    case OpKind::Q: return std::make_shared<PiecewiseClosedForm>(hardy_Q(op.param, f));
    case OpKind::I: return std::make_shared<PiecewiseClosedForm>(integral_I(f));
    case OpKind::M: return std::make_shared<MaximalFunction>(f);
    case OpKind::H: return std::make_shared<PiecewiseClosedForm>(hilbert(f));
  }
  raise(ErrorCode::unsupported_operator, "unknown operator");
}

double check_dilation_commute(const OperatorSpec& op, const StepFunction& f, double lambda,
                              const std::vector<double>& probes) {
  if (op.kind == OpKind::I) raise(ErrorCode::unsupported_operator, "I does not commute with dilations");
  const auto lhs = apply(op, f);
  const auto rhs = apply(op, dilate(f, lambda));
  double worst = 0.0;
  for (double t : probes) {
    const double l = (*lhs)(lambda * t), r = (*rhs)(t);
    if (!std::isfinite(l) || !std::isfinite(r)) continue;
    worst = std::max(worst, std::abs(l - r));
  }
  return worst;
}

namespace {

// Both directions of the tail: |g(x)| ~ A |x|^-m. Fitted on the exact form
// far outside the breakpoints.
struct TailFit {
  double A = 0.0;
  double m = 0.0;
};

TailFit fit_tail(const OperatorOutput& g, double sign, double scale) {
  const double x1 = sign * scale * 1e4, x2 = 2.0 * x1;
  const double g1 = std::abs(g(x1)), g2 = std::abs(g(x2));
  if (g1 == 0.0 && g2 == 0.0) return {};
  if (g2 == 0.0) return {};
  const double m = -std::log2(g2 / g1);
  return {g1 * std::pow(std::abs(x1), m), m};
}

void pretest_tail(const YoungFunction& phi, const TailFit& t, const PowerWeight& w, double k, double scale,
                  const char* side) {
  if (t.A == 0.0) return;
  auto mass = [&](double x) { return phi.Phi(k * t.A * std::pow(x, -t.m)) * w(x) * x; };
  const double x1 = scale * 1e8, x2 = 4.0 * x1;
  const double m1 = mass(x1), m2 = mass(x2);
  if (t.m <= 0.0 || !std::isfinite(m2) || (m1 > 0.0 && m2 / m1 >= 1.0 - 1e-9))
    raise(ErrorCode::divergent_integral, std::string("tail at ") + side + " infinity is not integrable");
}

}  // namespace

double modular_of_output(const YoungFunction& phi, const OperatorOutput& g, const PowerWeight& w, double k) {
  if (!(k > 0.0)) raise(ErrorCode::invalid_argument, "modular needs k > 0");
  const bool line = g.domain() == Domain::line;
  auto pts = g.breakpoints();
  pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (!line) pts.erase(std::remove_if(pts.begin(), pts.end(), [](double x) { return x < 0.0; }), pts.end());
  double scale = 1.0;
  for (double x : pts) scale = std::max(scale, std::abs(x));

  auto h = [&](double x) {
    const double v = g(x);
    if (!std::isfinite(v)) return kInf;
    const double r = phi.Phi(k * std::abs(v));
    return r == 0.0 ? 0.0 : r * w(x);
  };
  pretest_tail(phi, fit_tail(g, 1.0, scale), w, k, scale, "+");
  if (line) pretest_tail(phi, fit_tail(g, -1.0, scale), w, k, scale, "-");

  quad::Options opt;
  auto near = [&](double anchor, double dir, double len) {
    try {
      return quad::integrate_from_zero([&](double s) { return h(anchor + dir * s); }, len, {}, opt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_integral) throw;
      std::ostringstream os;
      os.precision(17);
      os << "integrand not integrable near breakpoint " << anchor;
      raise(ErrorCode::divergent_integral, os.str());
    }
  };
  auto sum = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double half = 0.5 * (pts[i + 1] - pts[i]);
      total += near(pts[i], 1.0, half) + near(pts[i + 1], -1.0, half);
    }
    auto tail = [&](double anchor, double dir) {
      const double len = std::max(std::abs(anchor), 1.0);
      double v = near(anchor, dir, len);
      try {
        v += quad::integrate_to_infinity([&](double s) { return h(dir * s); }, std::abs(anchor + dir * len), {}, opt);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::divergent_integral) throw;
        raise(ErrorCode::divergent_integral, std::string("tail at ") + (dir > 0 ? "+" : "-") + " infinity is not integrable");
      }
      return v;
    };
    total += tail(pts.back(), 1.0);
    if (line) total += tail(pts.front(), -1.0);
    return total;
  };
  // rough pass, then an absolute tolerance scaled to the whole integral
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-6;
  const double rough = sum();
  if (!(rough > 0.0)) return rough;
  opt.abs_tol = 1e-13 * rough;
  opt.rel_tol = 1e-10;
  return sum();
}

}  // namespace orliczkit
