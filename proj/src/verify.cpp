#include "orliczkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orliczkit/errors.hpp"
#include "orliczkit/parallel.hpp"
#include "orliczkit/quadrature.hpp"
#include "orliczkit/report.hpp"

namespace orliczkit {

using nlohmann::json;

namespace {

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json step_json(const StepFunction& f) { return json::parse(step_function_json(f)); }

Domain output_domain(const OperatorSpec& op) {
  return op.kind == OpKind::M || op.kind == OpKind::H ? Domain::line : Domain::half_line;
}

quad::Options inner_opts() {
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-10;
  return o;
}

// g restricted to (lo, hi), zero elsewhere.
class Windowed final : public OperatorOutput {
 public:
  Windowed(std::shared_ptr<const OperatorOutput> g, double lo, double hi) : g_(std::move(g)), lo_(lo), hi_(hi) {}
  double operator()(double x) const override { return x > lo_ && x < hi_ ? (*g_)(x) : 0.0; }
  Domain domain() const override { return g_->domain(); }
  std::vector<double> breakpoints() const override {
    std::vector<double> out{lo_, hi_};
    for (double x : g_->breakpoints())
      if (x > lo_ && x < hi_) out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::shared_ptr<const OperatorOutput> g_;
  double lo_, hi_;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<StepFunction> Corpus::members() const {
  if (count < 0 || max_pieces < 1 || !(lo > 0.0 && hi > lo) || !(max_value > 0.0))
    raise(ErrorCode::invalid_argument, "corpus parameters out of range");
  std::mt19937_64 rng(seed);
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<StepFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_pieces));
    std::vector<double> ends;
    while (true) {
      ends.clear();
      for (int j = 0; j < 2 * n; ++j) {
        double x = std::exp(llo + (lhi - llo) * uniform01(rng));
        if (domain == Domain::line && (rng() & 1u)) x = -x;
        ends.push_back(x);
      }
      std::sort(ends.begin(), ends.end());
      if (std::adjacent_find(ends.begin(), ends.end()) == ends.end()) break;
    }
    std::vector<Piece> pieces;
    for (int j = 0; j < n; ++j) pieces.push_back({ends[2 * j], ends[2 * j + 1], max_value * uniform01(rng)});
    out.emplace_back(std::move(pieces), domain);
  }
  return out;
}

json Corpus::meta() const {
  return {{"seed", seed},           {"count", count},         {"max_pieces", max_pieces},
          {"support", {lo, hi}},    {"values", {0.0, max_value}}, {"domain", to_string(domain)}};
}

json to_json(const EquivalenceReport& r) {
  return {{"suite", r.suite},
          {"directions", r.directions},
          {"passed", r.passed},
          {"worst_ratio", num_or_null(r.worst_ratio)},
          {"K", num_or_null(r.K)},
          {"C", num_or_null(r.C)},
          {"params", r.params},
          {"corpus", r.corpus},
          {"failing_member", r.failing_member},
          {"skipped", r.skipped},
          {"details", r.details}};
}

GaugeResult gauge_of_output(const YoungFunction& phi, const OperatorOutput& g, const PowerWeight& w, double eps) {
  if (!(eps > 0.0)) raise(ErrorCode::invalid_argument, "gauge needs eps > 0");
  auto level = [&](double lambda) { return eps / lambda * modular_of_output(phi, g, w, 1.0 / lambda); };
  GaugeResult r;
  double hi = 1.0;
  if (level(hi) == 0.0) {
    // zero output: every lambda qualifies
    return r;
  }
  double lo = hi;
  if (level(hi) > 1.0) {
    int n = 0;
    while (level(hi) > 1.0) {
      lo = hi;
      hi *= 16.0;
      if (++n > 250) raise(ErrorCode::no_finite_gauge, "gauge bracket did not close");
    }
  } else {
    int n = 0;
    while (level(lo) <= 1.0) {
      hi = lo;
      lo /= 16.0;
      if (++n > 250) return r;
    }
  }
  // Illinois false position on (log lambda, log level); bisection when a step is unusable.
  auto log_level = [&](double lambda) {
    const double v = level(lambda);
    return v > 0.0 ? std::log(v) : -kInf;
  };
  double a = std::log(lo), b = std::log(hi), fa = log_level(lo), fb = log_level(hi);
  int side = 0;
  while (hi - lo > 1e-13 * hi && r.iterations < 200) {
    double m = 0.5 * (a + b);
    const double margin = 3e-14;
    if (r.iterations < 60 && b - a > 4.0 * margin && std::isfinite(fa) && std::isfinite(fb) && fa > fb)
      m = std::clamp(b - fb * (b - a) / (fb - fa), a + margin, b - margin);
    double x = std::exp(m);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
      if (!(x > lo && x < hi)) break;
      m = std::log(x);
    }
    const double fm = log_level(x);
    if (fm <= 0.0) {
      hi = x, b = m, fb = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      lo = x, a = m, fa = fm;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
    ++r.iterations;
  }
  r.value = hi;
  r.lo = lo;
  r.hi = hi;
  r.residual = level(hi) - 1.0;
  return r;
}

WitnessFamily witness_family(const OperatorSpec& op, const YoungFunction& phi1, const YoungFunction& phi2,
                             double gamma, int steps) {
  const Domain dom = output_domain(op);
  const bool line = dom == Domain::line;
  const PowerWeight w{gamma, 1.0, dom};
  struct Shape {
    const char* name;
    std::function<StepFunction(double)> f;       // n = 2^j
    std::function<std::pair<double, double>(double)> window;
  };
  std::vector<Shape> shapes{
      {"chi(2^-j,1) on (0,2^j)",
       [dom](double n) { return StepFunction({{1.0 / n, 1.0, 1.0}}, dom); },
       [line](double n) { return std::pair{line ? -n : 0.0, n}; }},
      {"chi(0,2^-j) on (0,1)",
       [dom](double n) { return StepFunction({{0.0, 1.0 / n, 1.0}}, dom); },
       [line](double) { return std::pair{line ? -1.0 : 0.0, 1.0}; }},
      {"chi(1,2^j) on (0,2^j)",
       [dom](double n) { return StepFunction({{1.0, n, 1.0}}, dom); },
       [line](double n) { return std::pair{line ? -n : 0.0, n}; }},
  };
  if (line) std::swap(shapes[0], shapes[1]);
  WitnessFamily first;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    WitnessFamily out;
    out.family = shapes[s].name;
    for (int j = 1; j <= steps + 1; ++j) {
      const double n = std::ldexp(1.0, j);
      const auto f = shapes[s].f(n);
      const auto [lo, hi] = shapes[s].window(n);
      const Windowed g(apply(op, f), lo, hi);
      double num;
      try {
        num = modular_of_output(phi1, g, w, 1.0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::divergent_integral) throw;
        num = kInf;
      }
      out.ratios.push_back(num / modular(phi2, f, w, 1.0));
      out.windows.push_back(hi);
    }
    out.monotone = true;
    for (std::size_t i = 1; i < out.ratios.size(); ++i)
      if (!(std::isfinite(out.ratios[i]) && out.ratios[i] > out.ratios[i - 1])) out.monotone = false;
    if (out.monotone) return out;
    if (s == 0) first = out;
  }
  return first;
}

namespace {

json family_json(const WitnessFamily& f) {
  json r = json::array();
  for (double x : f.ratios) r.push_back(num_or_null(x));
  return {{"family", f.family}, {"ratios", r}, {"windows", f.windows}, {"monotone", f.monotone}};
}

// Minimal K with lhs <= K * modular(phi2, f, w, K).
double modular_K(double lhs, const YoungFunction& phi2, const StepFunction& f, const PowerWeight& w) {
  return minimal_constant([&](double K) { return lhs <= K * modular(phi2, f, w, K); });
}

const std::vector<double>& eps_family() {
  static const std::vector<double> e{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  return e;
}

}  // namespace

EquivalenceReport verify_gauge_modular_equiv(const YoungFunction& phi1, const YoungFunction& phi2,
                                             const OperatorSpec& op, double gamma, const Corpus& corpus0) {
  if (gamma == -1.0) raise(ErrorCode::invalid_argument, "gamma = -1 is excluded");
  if (op.kind == OpKind::I) raise(ErrorCode::unsupported_operator, "I does not commute with dilations");
  Corpus corpus = corpus0;
  corpus.domain = output_domain(op);
  const PowerWeight w{gamma, 1.0, corpus.domain};
  const double delta = 1.0 / (1.0 + gamma);
  EquivalenceReport rep;
  rep.suite = "theorem1";
  rep.directions = {"G=>M", "M=>G"};
  rep.params = {{"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"op", op.tag()}, {"gamma", gamma}};
  rep.corpus = corpus.meta();
  const auto members = corpus.members();
  struct Out {
    std::string skip;
    double ratio = 0.0, K = 0.0, C = 0.0, dev = 0.0;
    std::vector<double> eps_ratio;
  };
  const auto outs = parallel_map<Out>(members.size(), [&](std::size_t i) {
    Out o;
    const auto& f = members[i];
    if (f.is_zero()) {
      o.skip = "zero member: ratios 0/0";
      return o;
    }
    const auto g = apply(op, f);
    double m1;
    try {
      m1 = modular_of_output(phi1, *g, w, 1.0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_integral) throw;
      o.skip = e.what();
      return o;
    }
    o.ratio = m1 / modular(phi2, f, w, 1.0);
    o.K = modular_K(m1, phi2, f, w);
    o.C = gauge_of_output(phi1, *g, w).value / gauge(phi2, f, w).value;
    for (double eps : eps_family()) {
      const double direct = gauge_of_output(phi1, *g, w, eps).value / gauge(phi2, f, w, eps).value;
      const auto fd = dilate(f, std::pow(eps, -delta));
      const double dilated = gauge_of_output(phi1, *apply(op, fd), w).value / gauge(phi2, fd, w).value;
      o.eps_ratio.push_back(direct);
      o.dev = std::max(o.dev, std::abs(direct - dilated) / (1.0 + dilated));
    }
    return o;
  });
  bool any_skip = false, bounded = true;
  double dev = 0.0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    if (!o.skip.empty()) {
      any_skip = any_skip || o.skip.rfind("zero member", 0) != 0;
      rep.skipped.push_back({{"index", i}, {"reason", o.skip}});
      continue;
    }
    if (!std::isfinite(o.K)) {
      bounded = false;
      if (rep.failing_member.is_null()) rep.failing_member = {{"index", i}, {"f", step_json(members[i])}};
    }
    rep.worst_ratio = std::max(rep.worst_ratio, o.ratio);
    rep.K = std::max(rep.K, o.K);
    rep.C = std::max(rep.C, o.C);
    dev = std::max(dev, o.dev);
  }
  bool eps_ok = true;
  for (std::size_t i = 0; i < outs.size() && eps_ok; ++i)
    for (double r : outs[i].eps_ratio)
      if (r > rep.C * (1.0 + 1e-6)) {
        eps_ok = false;
        if (rep.failing_member.is_null()) rep.failing_member = {{"index", i}, {"f", step_json(members[i])}};
      }
  rep.details["eps"] = eps_family();
  rep.details["eps_collapse_deviation"] = dev;
  rep.details["eps_collapse_ok"] = dev <= 1e-6;
  rep.details["eps_ratio_bounded_by_C"] = eps_ok;
  rep.details["delta"] = delta;
  if (any_skip || !bounded) {
    const auto fam = witness_family(op, phi1, phi2, gamma);
    rep.details["witness_family"] = family_json(fam);
    if (fam.monotone) bounded = false;
  }
  rep.details["finite_K"] = bounded;
  if (!bounded) rep.K = kInf;
  rep.passed = bounded && !any_skip && dev <= 1e-6 && eps_ok;
  return rep;
}

namespace {

// int_a^b Phi(k |c| u(y)) v(y) dy summed over the pieces of f.
double weighted_step_modular(const YoungFunction& phi, const StepFunction& f, const PowerWeight& u,
                             const PowerWeight& v, double k) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) {
    const double c = k * std::abs(p.c);
    if (c == 0.0) continue;
    if (u.gamma == 0.0) {
      sum += phi.Phi(c * u.coeff) * v.measure(p.a, p.b);
      continue;
    }
    auto h = [&](double y) {
      const double r = phi.Phi(c * u(y));
      return r == 0.0 ? 0.0 : r * v(y);
    };
    sum += p.a == 0.0 ? quad::integrate_from_zero(h, p.b, {}, inner_opts()) : quad::integrate(h, p.a, p.b, {}, inner_opts());
  }
  return sum;
}

// Cumulative mass of f >= 0 on the half-line.
struct Primitive {
  std::vector<double> x, F;  // F(x[i]) at piece endpoints

  explicit Primitive(const StepFunction& f) {
    double acc = 0.0, prev = 0.0;
    x.push_back(0.0);
    F.push_back(0.0);
    for (const auto& p : f.pieces()) {
      if (p.a > prev) {
        x.push_back(p.a);
        F.push_back(acc);
      }
      acc += p.c * (p.b - p.a);
      x.push_back(p.b);
      F.push_back(acc);
      prev = p.b;
    }
  }
  double total() const { return F.back(); }
  double operator()(double t) const {
    if (t >= x.back()) return F.back();
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    const double slope = (F[i + 1] - F[i]) / (x[i + 1] - x[i]);
    return F[i] + slope * (t - x[i]);
  }
  /// smallest t with F(t) = level, for 0 < level < total
  double inverse(double level) const {
    const std::size_t i = static_cast<std::size_t>(std::lower_bound(F.begin(), F.end(), level) - F.begin());
    if (F[i] == level) {
      std::size_t j = i;
      while (j > 0 && F[j - 1] == level) --j;
      return x[j];
    }
    return x[i - 1] + (level - F[i - 1]) / (F[i] - F[i - 1]) * (x[i] - x[i - 1]);
  }
};

// int_lo^hi Phi1(k w(x)) t(x) dx, hi may be infinite.
double level_integral(const YoungFunction& phi1, const FourWeights& W, double k, double lo, double hi) {
  auto h = [&](double x) {
    const double r = phi1.Phi(k * W.w(x));
    return r == 0.0 ? 0.0 : r * W.t(x);
  };
  if (!(hi > lo)) return 0.0;
  if (std::isinf(hi)) {
    const double head = lo == 0.0 ? quad::integrate_from_zero(h, 1.0, {}, inner_opts()) : 0.0;
    return head + quad::integrate_to_infinity(h, lo == 0.0 ? 1.0 : lo, {}, inner_opts());
  }
  if (lo == 0.0) return quad::integrate_from_zero(h, hi, {}, inner_opts());
  return quad::integrate(h, lo, hi, {}, inner_opts());
}

}  // namespace

EquivalenceReport verify_weak_strong(const YoungFunction& phi1, const YoungFunction& phi2, const FourWeights& W,
                                     const Corpus& corpus0, const LogGrid& lambda_grid) {
  lambda_grid.validate();
  Corpus corpus = corpus0;
  corpus.domain = Domain::half_line;
  EquivalenceReport rep;
  rep.suite = "weakstrong";
  rep.directions = {"WM<=>M"};
  rep.params = {{"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"t", to_json(W.t)},
                {"u", to_json(W.u)},   {"v", to_json(W.v)},     {"w", to_json(W.w)}};
  rep.corpus = corpus.meta();
  const auto members = corpus.members();
  const auto lambdas = lambda_grid.values();

  struct Pair {
    double weak;  // int_{Ig > lambda} Phi1(lambda w) t
    StepFunction g;
  };
  struct Out {
    std::string skip;
    double strong = 0.0, weak = 0.0, dyadic = 0.0, remainder = 0.0, K = 0.0;
    std::vector<StepFunction> pieces;  // f_{k-1} for k = k_lo + 1 .. k_top
    bool weak_le_strong = true, strong_le_dyadic = true;
  };
  auto run = [&](std::size_t idx) {
    Out o;
    const auto& f0 = members[idx];
    if (f0.is_zero()) {
      o.skip = "zero member: both sides 0";
      return o;
    }
    const auto f = f0.abs();
    const Primitive If(f);
    const double M = If.total();
    try {
      // strong side int Phi1(w If) t
      const auto g = integral_I(f);
      auto h = [&](double x) {
        const double r = phi1.Phi(W.w(x) * g(x));
        return r == 0.0 ? 0.0 : r * W.t(x);
      };
      const auto br = f.breakpoints();
      o.strong = quad::integrate_from_zero(h, br.front(), {}, inner_opts()) +
                 quad::integrate(h, br.front(), br.back(), br, inner_opts()) +
                 quad::integrate_to_infinity(h, br.back(), {}, inner_opts());
      std::vector<Pair> pairs;
      for (double lambda : lambdas) {
        const auto ls = level_set_I(f, lambda);
        const double weak = ls.empty ? 0.0 : level_integral(phi1, W, lambda, ls.from, kInf);
        o.weak = std::max(o.weak, weak);
        pairs.push_back({weak, f});
      }
      // dyadic decomposition: If(x_k) = 2^k, I_k = [x_{k-1}, x_k)
      const int k_top = static_cast<int>(std::ceil(std::log2(M)));
      const int k_lo = k_top - 60;
      auto xk = [&](int k) {
        const double level = std::ldexp(1.0, k);
        return level >= M ? kInf : If.inverse(level);
      };
      // the cells I_k accumulate at the left end of the support, where If vanishes
      o.remainder = level_integral(phi1, W, std::ldexp(1.0, k_lo), f.support_lo(), xk(k_lo));
      o.dyadic = o.remainder;
      for (int k = k_lo + 1; k <= k_top; ++k) {
        const double a = xk(k - 1), b = xk(k);
        o.dyadic += level_integral(phi1, W, std::ldexp(1.0, k), a, b);
        // f_{k-1} = f on [x_{k-2}, x_{k-1})
        const auto fk = f.truncated(xk(k - 2), a);
        o.pieces.push_back(fk);
        const auto ls = level_set_I(fk.scaled(8.0), std::ldexp(1.0, k));
        const double weak = ls.empty ? 0.0 : level_integral(phi1, W, std::ldexp(1.0, k), ls.from, kInf);
        if (!ls.empty && !(ls.from <= a)) o.strong_le_dyadic = false;  // containment I_k in the level set
        pairs.push_back({weak, fk.scaled(8.0)});
      }
      for (const auto& p : pairs) {
        if (p.weak == 0.0) continue;
        o.K = std::max(o.K, minimal_constant([&](double K) {
                         return p.weak <= weighted_step_modular(phi2, p.g, W.u, W.v, K);
                       }));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_integral && e.code() != ErrorCode::divergent_alpha) throw;
      o.skip = e.what();
      return o;
    }
    o.weak_le_strong = o.weak <= o.strong * (1.0 + 1e-9);
    o.strong_le_dyadic = o.strong_le_dyadic && o.strong <= o.dyadic * (1.0 + 1e-9);
    return o;
  };
  const auto outs = parallel_map<Out>(members.size(), run);
  bool ok = true;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    if (!o.skip.empty()) {
      if (o.skip.rfind("zero member", 0) != 0) ok = false;
      rep.skipped.push_back({{"index", i}, {"reason", o.skip}});
      continue;
    }
    rep.K = std::max(rep.K, o.K);
  }
  // Chain with the corpus-wide K: strong <= dyadic sum <= int Phi2(8 K u f) v.
  double worst = 0.0, worst_remainder = 0.0;
  bool weak_ok = true, dyadic_ok = true, bound_ok = true;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    if (!o.skip.empty()) continue;
    const auto f = members[i].abs();
    const double rhs = weighted_step_modular(phi2, f, W.u, W.v, 8.0 * rep.K);
    double pieces_sum = 0.0;
    for (const auto& p : o.pieces) pieces_sum += weighted_step_modular(phi2, p, W.u, W.v, 8.0 * rep.K);
    const bool chain = o.dyadic - o.remainder <= pieces_sum * (1.0 + 1e-9) && pieces_sum <= rhs * (1.0 + 1e-9);
    const bool member_ok = o.weak_le_strong && o.strong_le_dyadic && chain && o.strong <= rhs * (1.0 + 1e-9);
    weak_ok = weak_ok && o.weak_le_strong;
    dyadic_ok = dyadic_ok && o.strong_le_dyadic;
    bound_ok = bound_ok && chain && o.strong <= rhs * (1.0 + 1e-9);
    worst = std::max(worst, o.strong / rhs);
    if (o.strong > 0.0) worst_remainder = std::max(worst_remainder, o.remainder / o.strong);
    if (!member_ok && rep.failing_member.is_null()) rep.failing_member = {{"index", i}, {"f", step_json(members[i])}};
  }
  rep.worst_ratio = worst;
  rep.C = 8.0 * rep.K;
  rep.details = {{"weak_le_strong", weak_ok},
                 {"strong_le_dyadic_sum", dyadic_ok},
                 {"dyadic_bound_8K", bound_ok},
                 {"dyadic_levels", 61},
                 {"truncated_remainder_max", worst_remainder},
                 {"lambda_grid", {{"lo", lambda_grid.lo}, {"hi", lambda_grid.hi}, {"points", lambda_grid.points}}}};
  rep.passed = ok && weak_ok && dyadic_ok && bound_ok && worst_remainder <= 1e-12;
  return rep;
}

EquivalenceReport verify_condition_predicts(const OperatorSpec& op, const YoungFunction& phi1,
                                            const YoungFunction& phi2_in, double gamma, const Corpus& corpus0) {
  Corpus corpus = corpus0;
  corpus.domain = output_domain(op);
  const bool same_phi = op.kind == OpKind::M || op.kind == OpKind::H;
  const YoungFunction& phi2 = same_phi ? phi1 : phi2_in;
  ConditionReport cond;
  switch (op.kind) {
    case OpKind::P: cond = check_bk_Pp(phi1, phi2, op.param, gamma); break;
    case OpKind::Q: cond = check_bk_Qq(phi1, phi2, op.param, gamma); break;
    case OpKind::M: cond = check_maximal_condition(phi1, gamma); break;
    case OpKind::H: cond = check_hilbert_condition(phi1, gamma); break;
    case OpKind::I: raise(ErrorCode::unsupported_operator, "I is covered by the weak/strong suite");
  }
  EquivalenceReport rep;
  rep.suite = "predicts";
  rep.directions = {"condition<=>empirical"};
  rep.params = {{"op", op.tag()}, {"phi1", phi1.spec()}, {"phi2", phi2.spec()}, {"gamma", gamma}};
  rep.corpus = corpus.meta();
  rep.details["condition"] = condition_json(cond);
  const PowerWeight w{gamma, 1.0, corpus.domain};
  if (!cond.holds()) {
    const auto fam = witness_family(op, phi1, phi2, gamma);
    rep.details["witness_family"] = family_json(fam);
    rep.K = kInf;
    rep.worst_ratio = fam.ratios.empty() ? 0.0 : fam.ratios.back();
    // an infinite modular ratio already exceeds every K
    const bool infinite = std::any_of(fam.ratios.begin(), fam.ratios.end(), [](double r) { return std::isinf(r); });
    rep.details["witness_infinite_ratio"] = infinite;
    rep.passed = fam.monotone || infinite;
    return rep;
  }
  rep.K = 8.0 * cond.c_min;
  rep.C = cond.c_min;
  const auto members = corpus.members();
  struct Out {
    std::string skip;
    double slack = 0.0;
    bool diverged = false;
  };
  const auto outs = parallel_map<Out>(members.size(), [&](std::size_t i) {
    Out o;
    const auto& f = members[i];
    if (f.is_zero()) {
      o.skip = "zero member";
      return o;
    }
    try {
      const double lhs = modular_of_output(phi1, *apply(op, f), w, 1.0);
      o.slack = lhs / (rep.K * modular(phi2, f, w, rep.K));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_integral) throw;
      o.skip = e.what();
      o.diverged = true;
    }
    return o;
  });
  bool ok = true;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    if (!o.skip.empty()) rep.skipped.push_back({{"index", i}, {"reason", o.skip}});
    const bool bad = o.diverged || o.slack > 1.0 + 1e-9;
    if (bad && rep.failing_member.is_null()) rep.failing_member = {{"index", i}, {"f", step_json(members[i])}};
    ok = ok && !bad;
    rep.worst_ratio = std::max(rep.worst_ratio, o.slack);
  }
  rep.details["slack_factor"] = 8.0;
  rep.details["worst_slack"] = rep.worst_ratio;
  rep.passed = ok;
  return rep;
}

json to_json(const CounterexampleReport& r) {
  return {{"gamma", r.gamma}, {"kmax", r.kmax}, {"passed", r.passed}, {"clauses", r.clauses}};
}

CounterexampleReport counterexample_report(double gamma, int kmax) {
  if (!(gamma > 0.0)) raise(ErrorCode::invalid_argument, "counterexample needs gamma > 0");
  if (kmax < 1) raise(ErrorCode::invalid_argument, "kmax must be at least 1");
  const AppendixChi chi(kmax);  // RangeError past exact factorials
  CounterexampleReport rep;
  rep.gamma = gamma;
  rep.kmax = kmax;
  auto mean = [&](double t) { return chi.integral(t) / t; };

  // (i) mean over (0, a_k) strictly above 2^-k = chi(a_k / k)
  json rows = json::array();
  bool c1 = true;
  for (int k = 1; k <= kmax; ++k) {
    const double a = chi.a(k);
    const double lhs = mean(a), rhs = std::ldexp(1.0, -k);
    const double margin = lhs / rhs - 1.0;
    const bool margin_ok = k > 8 || margin >= 0.1 / (k + 3);
    const bool ok = lhs > rhs && chi.value(a / k) == rhs && margin_ok;
    c1 = c1 && ok;
    rows.push_back({{"k", k}, {"a_k", a}, {"mean", lhs}, {"chi_a_k_over_k", rhs}, {"margin", margin}, {"ok", ok}});
  }
  rep.clauses["i_mean_exceeds"] = {{"holds", c1}, {"rows", rows}};

  // (ii) mean over (0, t) <= 4 chi(t / 4^(1/gamma)) on a log grid
  const LogGrid g2{1e-6, chi.a(kmax), 241};
  double worst = 0.0, worst_t = 0.0;
  for (double t : g2.values()) {
    const double r = mean(t) / (4.0 * chi.value(t / std::pow(4.0, 1.0 / gamma)));
    if (r > worst) {
      worst = r;
      worst_t = t;
    }
  }
  rep.clauses["ii_four_chi_bound"] = {{"holds", worst <= 1.0},
                                      {"worst_ratio", worst},
                                      {"worst_t", worst_t},
                                      {"grid", {{"lo", g2.lo}, {"hi", g2.hi}, {"points", g2.points}}}};

  // (iii) (*) mean(a_k) <= 2 chi(a_k), and the induction step in corrected form
  rows = json::array();
  bool c3 = true;
  for (int k = 0; k <= kmax; ++k) {
    const double a = chi.a(k);
    const bool star = mean(a) <= 2.0 * chi.value(a);
    json row = {{"k", k}, {"mean", mean(a)}, {"two_chi", 2.0 * chi.value(a)}, {"star", star}};
    bool ok = star;
    if (k >= 1) {
      // mean(a_k) = (a_{k-1}/a_k) mean(a_{k-1}) + (1/a_k) int_{a_{k-1}}^{a_k} chi
      const double ap = chi.a(k - 1);
      const double split = ap / a * mean(ap) + (chi.integral(a) - chi.integral(ap)) / a;
      // ramp 3/4 * 2^-(k-1) plus the flat piece (a_k - a_{k-1} - 1) 2^-k
      const double piece = 0.75 * std::ldexp(1.0, -(k - 1)) + (a - ap - 1.0) * std::ldexp(1.0, -k);
      const double bound = ap / a * 2.0 * chi.value(ap) + piece / a;
      const bool split_ok = std::abs(split - mean(a)) <= 1e-15 * mean(a);
      const bool bound_ok = mean(a) <= bound * (1.0 + 1e-15) && bound <= 2.0 * chi.value(a);
      row["split_identity"] = split_ok;
      row["induction_bound"] = bound;
      row["bound_ok"] = bound_ok;
      ok = ok && split_ok && bound_ok;
    }
    c3 = c3 && ok;
    rows.push_back(row);
  }
  rep.clauses["iii_star_induction"] = {{"holds", c3}, {"rows", rows}};

  // (iv) the two conditions separate for phi_gamma
  const auto phi = make_appendix2(gamma);
  const auto aphi = check_aphi_power(phi, gamma);
  const auto bk = check_bk_general(phi, PowerWeight{gamma, 1.0, Domain::line});
  const bool c4 = aphi.status == Status::fails && bk.status == Status::holds;
  rep.clauses["iv_aphi_fails_bk_holds"] = {
      {"holds", c4}, {"aphi", condition_json(aphi)}, {"bk", condition_json(bk)}};

  rep.passed = c1 && worst <= 1.0 && c3 && c4;
  return rep;
}

}  // namespace orliczkit
