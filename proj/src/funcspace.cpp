#include "orliczkit/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "orliczkit/errors.hpp"

namespace orliczkit {

const char* to_string(Domain d) { return d == Domain::line ? "r" : "r+"; }

Domain parse_domain(std::string_view tag) {
  if (tag == "r+") return Domain::half_line;
  if (tag == "r") return Domain::line;
  raise(ErrorCode::parse_error, "domain must be r+ or r");
}

StepFunction::StepFunction(std::vector<Piece> pieces, Domain domain) : pieces_(std::move(pieces)), domain_(domain) {
  for (const auto& p : pieces_) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c))
      raise(ErrorCode::invalid_argument, "step pieces must be finite");
    if (!(p.a < p.b)) raise(ErrorCode::invalid_argument, "step piece needs a < b");
    if (domain_ == Domain::half_line && p.a < 0.0) raise(ErrorCode::invalid_argument, "piece leaves r+");
  }
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
  for (std::size_t i = 1; i < pieces_.size(); ++i)
    if (pieces_[i].a < pieces_[i - 1].b) raise(ErrorCode::invalid_argument, "step pieces overlap");
}

bool StepFunction::is_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.c == 0.0; });
}

double StepFunction::value(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](double v, const Piece& p) { return v < p.a; });
  if (it == pieces_.begin()) return 0.0;
  --it;
  return x < it->b ? it->c : 0.0;
}

std::vector<double> StepFunction::breakpoints() const {
  std::vector<double> r;
  for (const auto& p : pieces_) {
    r.push_back(p.a);
    r.push_back(p.b);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

double StepFunction::support_lo() const { return pieces_.empty() ? 0.0 : pieces_.front().a; }
double StepFunction::support_hi() const { return pieces_.empty() ? 0.0 : pieces_.back().b; }

StepFunction StepFunction::scaled(double c) const {
  auto out = pieces_;
  for (auto& p : out) p.c *= c;
  return StepFunction(std::move(out), domain_);
}

StepFunction StepFunction::abs() const {
  auto out = pieces_;
  for (auto& p : out) p.c = std::abs(p.c);
  return StepFunction(std::move(out), domain_);
}

StepFunction StepFunction::truncated(double lo, double hi) const {
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    const double a = std::max(p.a, lo), b = std::min(p.b, hi);
    if (a < b) out.push_back({a, b, p.c});
  }
  return StepFunction(std::move(out), domain_);
}

StepFunction dilate(const StepFunction& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) raise(ErrorCode::invalid_argument, "dilation needs lambda > 0");
  std::vector<Piece> out;
  for (const auto& p : f.pieces()) out.push_back({p.a / lambda, p.b / lambda, p.c});
  return StepFunction(std::move(out), f.domain());
}

StepFunction add(const StepFunction& f, const StepFunction& g) {
  const Domain d = f.domain() == Domain::line || g.domain() == Domain::line ? Domain::line : Domain::half_line;
  auto pts = f.breakpoints();
  const auto more = g.breakpoints();
  pts.insert(pts.end(), more.begin(), more.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double c = f.value(mid) + g.value(mid);
    if (c == 0.0) continue;
    if (!out.empty() && out.back().b == pts[i] && out.back().c == c)
      out.back().b = pts[i + 1];
    else
      out.push_back({pts[i], pts[i + 1], c});
  }
  return StepFunction(std::move(out), d);
}

StepFunction parse_step_function(std::string_view json_text, Domain domain) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::parse_error, std::string("step function JSON: ") + e.what());
  }
  if (!j.is_array()) raise(ErrorCode::parse_error, "step function JSON must be a list");
  std::vector<Piece> pieces;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("a") || !item.contains("b") || !item.contains("c"))
      raise(ErrorCode::parse_error, "each piece needs a, b, c");
    if (!item["a"].is_number() || !item["b"].is_number() || !item["c"].is_number())
      raise(ErrorCode::parse_error, "piece fields must be numbers");
    pieces.push_back({item["a"].get<double>(), item["b"].get<double>(), item["c"].get<double>()});
  }
  try {
    return StepFunction(std::move(pieces), domain);
  } catch (const Error& e) {
    raise(ErrorCode::parse_error, e.what());
  }
}

StepFunction load_step_function(const std::string& path, Domain domain) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::parse_error, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_step_function(ss.str(), domain);
}

std::string step_function_json(const StepFunction& f) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : f.pieces()) j.push_back({{"a", p.a}, {"b", p.b}, {"c", p.c}});
  return j.dump();
}

double PowerWeight::operator()(double x) const { return coeff * std::pow(std::abs(x), gamma); }

namespace {

// int_a^b x^g dx for 0 <= a < b
double half_measure(double g, double a, double b) {
  const double e = g + 1.0;
  if (a == 0.0) {
    if (e <= 0.0) raise(ErrorCode::divergent_integral, "weight not integrable at 0");
    return std::pow(b, e) / e;
  }
  const double lr = std::log1p((b - a) / a);
  if (e == 0.0) return lr;
  return std::pow(a, e) * std::expm1(e * lr) / e;
}

}  // namespace

double PowerWeight::measure(double a, double b) const {
  if (!(a < b)) return 0.0;
  if (std::isinf(a) || std::isinf(b)) raise(ErrorCode::divergent_integral, "unbounded interval");
  if (a >= 0.0) return coeff * half_measure(gamma, a, b);
  if (domain == Domain::half_line) raise(ErrorCode::invalid_argument, "interval leaves r+");
  if (b <= 0.0) return coeff * half_measure(gamma, -b, -a);
  return coeff * (half_measure(gamma, 0.0, -a) + half_measure(gamma, 0.0, b));
}

double modular(const YoungFunction& phi, const StepFunction& f, const PowerWeight& w, double k) {
  if (!(k > 0.0)) raise(ErrorCode::invalid_argument, "modular needs k > 0");
  double sum = 0.0;
  for (const auto& p : f.pieces()) {
    if (p.c == 0.0) continue;
    const double v = phi.Phi(k * std::abs(p.c));
    if (v == 0.0) continue;
    sum += v * w.measure(p.a, p.b);
  }
  return sum;
}

namespace {

// Root of a continuous nonincreasing map G with G(lambda) = 1.
GaugeResult solve_unit_level(const std::function<double(double)>& G) {
  GaugeResult r;
  double lam = 1.0;
  double g = G(lam);
  int steps = 0;
  double lo, hi;
  if (g > 1.0) {
    lo = lam;
    while (g > 1.0) {
      lam *= 2.0;
      if (++steps > 2100 || std::isinf(lam)) raise(ErrorCode::no_finite_gauge, "modular stays above 1");
      g = G(lam);
    }
    hi = lam;
    lo = lam / 2.0;
  } else {
    hi = lam;
    while (!(g > 1.0)) {
      lam /= 2.0;
      if (++steps > 2100 || lam == 0.0) raise(ErrorCode::no_finite_gauge, "modular never exceeds 1");
      g = G(lam);
    }
    lo = lam;
    hi = lam * 2.0;
  }
  int it = 0;
  while (it < 200 && hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (G(mid) > 1.0 ? lo : hi) = mid;
    ++it;
  }
  r.lo = lo;
  r.hi = hi;
  r.value = 0.5 * (lo + hi);
  r.iterations = steps + it;
  r.residual = std::abs(G(r.value) - 1.0);
  return r;
}

}  // namespace

GaugeResult gauge(const YoungFunction& phi, const StepFunction& f, const PowerWeight& w, double eps) {
  if (!(eps > 0.0)) raise(ErrorCode::invalid_argument, "gauge needs eps > 0");
  if (f.is_zero()) return {};
  return solve_unit_level([&](double lam) { return eps / lam * modular(phi, f, w, 1.0 / lam); });
}

GaugeResult gauge_s(const YoungFunction& phi, const StepFunction& f, const PowerWeight& mu, double s) {
  if (!(s > 0.0 && s <= 1.0)) raise(ErrorCode::invalid_argument, "s must lie in (0, 1]");
  if (f.is_zero()) return {};
  return solve_unit_level([&](double lam) { return modular(phi, f, mu, std::pow(lam, -1.0 / s)); });
}

}  // namespace orliczkit
