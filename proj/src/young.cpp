#include "orliczkit/young.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "orliczkit/errors.hpp"
#include "orliczkit/parallel.hpp"
#include "orliczkit/quadrature.hpp"

namespace orliczkit {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

class ConstantForm final : public DensityForm {
 public:
  explicit ConstantForm(double c) : c_(c) {}
  double value(double) const override { return c_; }
  double integral(double a, double b) const override { return b == a ? 0.0 : c_ * (b - a); }
  double inverse(double) const override { raise(ErrorCode::not_monotone, "inverse of a constant piece"); }
  bool constant() const override { return true; }
  bool nondecreasing_on(double, double) const override { return true; }
  std::string describe() const override { return "const(" + num(c_) + ")"; }

 private:
  double c_;
};

class PowerForm final : public DensityForm {
 public:
  PowerForm(double k, double c, double h, double e) : k_(k), c_(c), h_(h), e_(e) {}
  double value(double s) const override { return k_ + c_ * std::pow(s - h_, e_); }
  double integral(double a, double b) const override {
    if (b == a) return 0.0;
    const double x = a - h_, y = b - h_;
    if (std::isinf(b)) {
      if (k_ == 0.0 && e_ < -1.0) return c_ * -std::pow(x, e_ + 1.0) / (e_ + 1.0);
      return k_ + c_ > 0.0 ? kInf : -kInf;
    }
    const double base = k_ == 0.0 ? 0.0 : k_ * (b - a);
    if (e_ == -1.0) return base + c_ * std::log(y / x);
    return base + c_ * (std::pow(y, e_ + 1.0) - std::pow(x, e_ + 1.0)) / (e_ + 1.0);
  }
  double inverse(double y) const override {
    const double r = std::max((y - k_) / c_, 0.0);
    if (e_ == 1.0) return h_ + r;
    return h_ + std::pow(r, 1.0 / e_);
  }
  bool nondecreasing_on(double lo, double) const override { return c_ * e_ >= 0.0 && lo >= h_; }
  std::string describe() const override {
    return "pow(k=" + num(k_) + ",c=" + num(c_) + ",h=" + num(h_) + ",e=" + num(e_) + ")";
  }

 private:
  double k_, c_, h_, e_;
};

class LogForm final : public DensityForm {
 public:
  LogForm(double k, double c, double h) : k_(k), c_(c), h_(h) {}
  double value(double s) const override { return k_ + c_ * std::log(s - h_); }
  double integral(double a, double b) const override {
    if (b == a) return 0.0;
    if (std::isinf(b)) return kInf;
    auto anti = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x) - x; };
    return k_ * (b - a) + c_ * (anti(b - h_) - anti(a - h_));
  }
  double inverse(double y) const override { return h_ + std::exp((y - k_) / c_); }
  bool nondecreasing_on(double lo, double) const override { return c_ >= 0.0 && lo >= h_; }
  std::string describe() const override { return "log(k=" + num(k_) + ",c=" + num(c_) + ",h=" + num(h_) + ")"; }

 private:
  double k_, c_, h_;
};

class ExpForm final : public DensityForm {
 public:
  ExpForm(double k, double c, double b) : k_(k), c_(c), b_(b) {}
  double value(double s) const override { return k_ + c_ * std::exp(b_ * s); }
  double integral(double a, double b) const override {
    if (b == a) return 0.0;
    if (std::isinf(b)) return kInf;
    return k_ * (b - a) + (c_ / b_) * std::exp(b_ * a) * std::expm1(b_ * (b - a));
  }
  double inverse(double y) const override { return std::log((y - k_) / c_) / b_; }
  bool nondecreasing_on(double, double) const override { return c_ * b_ >= 0.0; }
  std::string describe() const override { return "exp(k=" + num(k_) + ",c=" + num(c_) + ",b=" + num(b_) + ")"; }

 private:
  double k_, c_, b_;
};

class PowLogForm final : public DensityForm {
 public:
  PowLogForm(double r, double a) : r_(r), a_(a) {
    // anti_[i] = int_0^(2^(i + kLo)) value
    anti_.resize(kHi - kLo + 1);
    anti_[0] = quad::integrate_from_zero([this](double s) { return value(s); }, std::ldexp(1.0, kLo), {}, opts());
    for (int k = kLo; k < kHi; ++k)
      anti_[k - kLo + 1] = anti_[k - kLo] + direct(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
  }
  double value(double s) const override {
    const double p = r_ == 1.0 ? 1.0 : r_ == 2.0 ? s : std::pow(s, r_ - 1.0);
    const double l = std::log(M_E + s);
    return p * (a_ == 1.0 ? l : std::pow(l, a_));
  }
  double integral(double a, double b) const override {
    if (b == a) return 0.0;
    if (std::isinf(b)) return kInf;
    if (a == 0.0) {
      int e;
      std::frexp(b, &e);
      const int k = e - 1;  // 2^k <= b < 2^(k+1)
      if (k >= kLo && k <= kHi) {
        const double x = std::ldexp(1.0, k);
        return anti_[k - kLo] + (b == x ? 0.0 : direct(x, b));
      }
      return quad::integrate_from_zero([this](double s) { return value(s); }, b, {}, opts());
    }
    return direct(a, b);
  }
  double inverse(double y) const override {
    if (y <= value(0.0)) return 0.0;
    if (std::isinf(y)) return kInf;
    // Bracket [lo, hi] with value(lo) <= y < value(hi), then safeguarded
    // Newton on log value in u = log s.
    double lo = 1.0, hi = 1.0;
    if (value(1.0) <= y) {
      while (value(hi) <= y) {
        lo = hi;
        hi *= 16.0;
        if (std::isinf(hi)) return kInf;
      }
    } else {
      while (value(lo) > y) {
        hi = lo;
        lo /= 16.0;
        if (lo == 0.0) return 0.0;
      }
    }
    const double ly = std::log(y);
    double u = 0.5 * (std::log(lo) + std::log(hi));
    for (int i = 0; i < 100; ++i) {
      const double s = std::exp(u);
      if (!(s > lo && s < hi)) break;
      const double v = value(s);
      (v <= y ? lo : hi) = s;
      const double l = std::log(M_E + s);
      const double slope = (r_ - 1.0) + a_ * s / ((M_E + s) * l);
      double next = slope > 0.0 ? u - (std::log(v) - ly) / slope : -kInf;
      const double ulo = std::log(lo), uhi = std::log(hi);
      if (!(next > ulo && next < uhi)) next = 0.5 * (ulo + uhi);
      if (std::abs(next - u) <= 1e-15 * std::max(1.0, std::abs(u))) break;
      u = next;
    }
    const double s = std::exp(u);
    if (const double c = s * (1.0 - 1e-13); c > lo && c < hi && value(c) <= y) lo = c;
    if (const double c = s * (1.0 + 1e-13); c > lo && c < hi && value(c) > y) hi = c;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (value(mid) <= y ? lo : hi) = mid;
    }
    return lo;
  }
  bool nondecreasing_on(double lo, double hi) const override {
    if (r_ >= 1.0 && a_ >= 0.0) return true;
    // sign of d/ds log phi, scaled by s (e+s) log(e+s)
    const double from = std::max(lo, 1e-12), to = std::min(hi, 1e12);
    for (int i = 0; i <= 400; ++i) {
      const double s = from * std::pow(to / from, i / 400.0);
      const double l = (M_E + s) * std::log(M_E + s);
      if ((r_ - 1.0) * l + a_ * s < 0.0) return false;
    }
    return true;
  }
  std::string describe() const override { return "plog(r=" + num(r_) + ",a=" + num(a_) + ")"; }

 private:
  static constexpr int kLo = -64, kHi = 64;

  static quad::Options opts() {
    quad::Options opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 0.0;
    return opt;
  }

  double direct(double a, double b) const {
    std::vector<double> cuts;
    for (double x = a * 4.0; x < b; x *= 4.0) cuts.push_back(x);
    return quad::integrate([this](double s) { return value(s); }, a, b, cuts, opts());
  }

  double r_, a_;
  std::vector<double> anti_;
};

class InverseForm final : public DensityForm {
 public:
  explicit InverseForm(FormPtr base) : base_(std::move(base)) {}
  const FormPtr& base() const { return base_; }
  double value(double y) const override { return base_->inverse(y); }
  double integral(double a, double b) const override {
    if (b == a) return 0.0;
    if (std::isinf(b)) return kInf;
    const double xa = value(a), xb = value(b);
    return b * xb - a * xa - base_->integral(xa, xb);
  }
  double inverse(double s) const override { return base_->value(s); }
  bool nondecreasing_on(double, double) const override { return true; }
  std::string describe() const override { return "inv(" + base_->describe() + ")"; }

 private:
  FormPtr base_;
};

// Pins a form to a box so rounding at the ends cannot break monotone joins.
class ClampedForm final : public DensityForm {
 public:
  ClampedForm(FormPtr base, double dlo, double dhi, double vmin, double vmax)
      : base_(std::move(base)), dlo_(dlo), dhi_(dhi), vmin_(vmin), vmax_(vmax) {}
  double value(double s) const override { return std::clamp(base_->value(std::clamp(s, dlo_, dhi_)), vmin_, vmax_); }
  double integral(double a, double b) const override { return base_->integral(a, b); }
  double inverse(double y) const override {
    return std::clamp(base_->inverse(std::clamp(y, vmin_, vmax_)), dlo_, dhi_);
  }
  bool nondecreasing_on(double lo, double hi) const override { return base_->nondecreasing_on(lo, hi); }
  std::string describe() const override { return base_->describe(); }

 private:
  FormPtr base_;
  double dlo_, dhi_, vmin_, vmax_;
};

}  // namespace

FormPtr constant_form(double c) { return std::make_shared<ConstantForm>(c); }

FormPtr power_form(double k, double c, double h, double e) {
  if (c == 0.0 || e == 0.0) return constant_form(k + c);
  return std::make_shared<PowerForm>(k, c, h, e);
}

FormPtr log_form(double k, double c, double h) {
  if (c == 0.0) return constant_form(k);
  return std::make_shared<LogForm>(k, c, h);
}

FormPtr exp_form(double k, double c, double b) {
  if (c == 0.0 || b == 0.0) return constant_form(k + c);
  return std::make_shared<ExpForm>(k, c, b);
}

FormPtr powlog_form(double r, double a) { return std::make_shared<PowLogForm>(r, a); }

FormPtr inverse_form(FormPtr base) {
  if (auto inv = std::dynamic_pointer_cast<const InverseForm>(base)) return inv->base();
  return std::make_shared<InverseForm>(std::move(base));
}

YoungFunction::YoungFunction(std::vector<DensitySegment> segments, std::string spec)
    : segs_(std::move(segments)), spec_(std::move(spec)) {
  if (segs_.empty()) raise(ErrorCode::invalid_argument, "density needs at least one segment");
  if (segs_.front().lo != 0.0) raise(ErrorCode::invalid_argument, "first segment must start at 0");
  if (!std::isinf(segs_.back().hi)) raise(ErrorCode::invalid_argument, "last segment must be unbounded");
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    auto& g = segs_[i];
    if (!g.form) raise(ErrorCode::invalid_argument, "segment without form");
    if (!(g.hi > g.lo)) raise(ErrorCode::invalid_argument, "empty segment");
    if (i > 0 && g.lo != segs_[i - 1].hi) raise(ErrorCode::invalid_argument, "segments must be contiguous");
    g.vlo = g.form->value(g.lo);
    g.vhi = g.form->value(g.hi);
    if (!g.form->nondecreasing_on(g.lo, g.hi)) monotone_ = false;
    if (i > 0) {
      const double prev = segs_[i - 1].vhi;
      if (g.vlo < prev - 1e-12 * std::abs(prev)) monotone_ = false;
    }
  }
  cum_.assign(segs_.size(), 0.0);
  for (std::size_t i = 1; i < segs_.size(); ++i)
    cum_[i] = cum_[i - 1] + segs_[i - 1].form->integral(segs_[i - 1].lo, segs_[i - 1].hi);
  kind_ = monotone_ && phi_zero() == 0.0 && std::isinf(phi_sup()) ? YoungKind::young : YoungKind::general;
}

std::size_t YoungFunction::locate(double s) const {
  auto it = std::upper_bound(segs_.begin(), segs_.end(), s, [](double v, const DensitySegment& g) { return v < g.lo; });
  return it == segs_.begin() ? 0 : static_cast<std::size_t>(it - segs_.begin()) - 1;
}

double YoungFunction::Phi(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (std::isinf(t)) return kInf;
  const std::size_t i = locate(t);
  return cum_[i] + segs_[i].form->integral(segs_[i].lo, t);
}

double YoungFunction::phi(double s) const {
  if (s < 0.0) raise(ErrorCode::invalid_argument, "density evaluated at negative argument");
  return segs_[locate(s)].form->value(s);
}

double YoungFunction::phi_inv(double y) const {
  if (!monotone_) raise(ErrorCode::not_monotone, spec_ + " has a decreasing density");
  if (y < 0.0 || std::isnan(y)) raise(ErrorCode::invalid_argument, "phi_inv needs y >= 0");
  if (std::isinf(y) && std::isinf(segs_.back().hi) && std::isinf(segs_.back().vhi)) return kInf;
  auto it = std::partition_point(segs_.begin(), segs_.end(), [y](const DensitySegment& g) { return g.vhi <= y; });
  if (it == segs_.end()) raise(ErrorCode::unbounded, spec_ + ": level " + num(y) + " is not below sup phi");
  if (it->vlo > y) return it->lo;
  return std::clamp(it->form->inverse(y), it->lo, it->hi);
}

YoungFunction YoungFunction::complementary() const {
  if (!monotone_) raise(ErrorCode::not_monotone, spec_ + " has a decreasing density");
  if (kind_ != YoungKind::young) raise(ErrorCode::not_young, spec_ + " is not a Young function");
  std::vector<DensitySegment> out;
  auto push = [&out](double lo, double hi, FormPtr f) {
    if (hi > lo) out.push_back({lo, hi, std::move(f), 0.0, 0.0});
  };
  double level = 0.0;
  for (const auto& g : segs_) {
    if (g.vlo > level) push(level, g.vlo, constant_form(g.lo));
    if (!g.form->constant() && g.vhi > g.vlo) push(g.vlo, g.vhi, inverse_form(g.form));
    level = std::max(level, g.vhi);
  }
  std::string spec;
  const std::string wrap = "complementary(";
  if (spec_.rfind(wrap, 0) == 0 && spec_.back() == ')')
    spec = spec_.substr(wrap.size(), spec_.size() - wrap.size() - 1);
  else
    spec = wrap + spec_ + ")";
  return YoungFunction(std::move(out), std::move(spec));
}

std::vector<double> YoungFunction::t_breaks() const {
  std::vector<double> r;
  for (std::size_t i = 1; i < segs_.size(); ++i) r.push_back(segs_[i].lo);
  return r;
}

std::vector<double> YoungFunction::y_breaks() const {
  std::vector<double> r;
  for (const auto& g : segs_)
    for (double v : {g.vlo, g.vhi})
      if (v > 0.0 && std::isfinite(v)) r.push_back(v);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

YoungFunction make_power(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) raise(ErrorCode::parse_error, "power needs r > 0");
  const std::string spec = "power:r=" + num(r);
  FormPtr f = r == 1.0 ? constant_form(1.0) : power_form(0.0, 1.0, 0.0, r - 1.0);
  return YoungFunction({{0.0, kInf, f, 0.0, 0.0}}, spec);
}

YoungFunction make_plog(double r, double a) {
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(a)) raise(ErrorCode::parse_error, "plog needs r > 0");
  YoungFunction y({{0.0, kInf, powlog_form(r, a), 0.0, 0.0}}, "plog:r=" + num(r) + ",a=" + num(a));
  if (!y.monotone()) raise(ErrorCode::not_monotone, y.spec() + " decreases somewhere");
  return y;
}

YoungFunction make_expm1() { return YoungFunction({{0.0, kInf, exp_form(0.0, 1.0, 1.0), 0.0, 0.0}}, "expm1"); }

YoungFunction make_pwl_density(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) raise(ErrorCode::parse_error, "pwl-density needs at least two points");
  std::string spec = "pwl-density:";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [t, y] = pts[i];
    if (!std::isfinite(t) || !std::isfinite(y) || t < 0.0) raise(ErrorCode::parse_error, "bad pwl point");
    if (i > 0 && !(t > pts[i - 1].first)) raise(ErrorCode::parse_error, "pwl abscissae must increase");
    if (i > 0 && y < pts[i - 1].second) raise(ErrorCode::not_monotone, "pwl density decreases");
    spec += (i ? ";(" : "(") + num(t) + "," + num(y) + ")";
  }
  std::vector<DensitySegment> segs;
  if (pts.front().first > 0.0) segs.push_back({0.0, pts.front().first, constant_form(pts.front().second), 0, 0});
  double slope = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [t0, y0] = pts[i];
    const auto [t1, y1] = pts[i + 1];
    slope = (y1 - y0) / (t1 - t0);
    segs.push_back({t0, t1, power_form(y0, slope, t0, 1.0), 0, 0});
  }
  const auto [tn, yn] = pts.back();
  segs.push_back({tn, kInf, power_form(yn, slope, tn, 1.0), 0, 0});
  return YoungFunction(std::move(segs), spec);
}

YoungFunction make_appendix2(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) raise(ErrorCode::parse_error, "appendix2 needs gamma > 0");
  // Density of the complementary function: y -> chi(y^(-1/gamma)).
  std::vector<double> a{1.0};
  double fact = 24.0;
  for (int k = 1; k <= 167; ++k) {
    if (!std::isfinite(fact) || std::pow(fact + 1.0, -gamma) < 1e-300) break;
    a.push_back(fact);
    fact *= static_cast<double>(k + 4);
  }
  const int K = static_cast<int>(a.size()) - 1;
  auto ylo = [&](int k) { return std::pow(a[k] + 1.0, -gamma); };
  auto yhi = [&](int k) { return std::pow(a[k], -gamma); };
  std::vector<DensitySegment> segs;
  auto push = [&segs](double lo, double hi, FormPtr f) {
    if (hi > lo) segs.push_back({lo, hi, std::move(f), 0, 0});
  };
  const double floor_v = std::ldexp(1.0, -K - 1);
  push(0.0, ylo(K), power_form(0.0, floor_v / ylo(K), 0.0, 1.0));
  for (int k = K; k >= 0; --k) {
    const double top = std::ldexp(1.0, -k);
    FormPtr ramp;
    if (a[k] < 1e8) {
      ramp = power_form(top * (1.0 + a[k] / 2.0), -top / 2.0, 0.0, -1.0 / gamma);
    } else {
      // a_k + 1 is not resolved next to a_k here; interpolate linearly in y.
      const double m = (top - top / 2.0) / (yhi(k) - ylo(k));
      ramp = power_form(top / 2.0, m, ylo(k), 1.0);
    }
    push(ylo(k), yhi(k), std::make_shared<ClampedForm>(ramp, ylo(k), yhi(k), top / 2.0, top));
    if (k >= 1) push(yhi(k), ylo(k - 1), constant_form(top));
  }
  push(1.0, kInf, log_form(1.0, 1.0 / gamma, 0.0));
  YoungFunction psi(std::move(segs), "complementary(appendix2:gamma=" + num(gamma) + ")");
  return psi.complementary();
}

namespace {

double parse_real(std::string_view text) {
  const std::string s(text);
  if (s.empty()) raise(ErrorCode::parse_error, "empty number");
  const auto slash = s.find('/');
  if (slash != std::string::npos) return parse_real(text.substr(0, slash)) / parse_real(text.substr(slash + 1));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) raise(ErrorCode::parse_error, "bad number '" + s + "'");
  return v;
}

double keyed(std::string_view item, std::string_view key) {
  if (item.substr(0, key.size()) != key || item.size() <= key.size() || item[key.size()] != '=')
    raise(ErrorCode::parse_error, "expected " + std::string(key) + "=<real>");
  return parse_real(item.substr(key.size() + 1));
}

}  // namespace

YoungFunction parse_young_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "expm1" && colon == std::string_view::npos) return make_expm1();
  if (colon == std::string_view::npos) raise(ErrorCode::parse_error, "unknown Young spec '" + std::string(spec) + "'");
  if (head == "power") return make_power(keyed(body, "r"));
  if (head == "appendix2") return make_appendix2(keyed(body, "gamma"));
  if (head == "plog") {
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) raise(ErrorCode::parse_error, "plog needs r=<real>,a=<real>");
    return make_plog(keyed(body.substr(0, comma), "r"), keyed(body.substr(comma + 1), "a"));
  }
  if (head == "pwl-density") {
    std::vector<std::pair<double, double>> pts;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto semi = body.find(';', pos);
      std::string_view item = body.substr(pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
      if (item.size() < 5 || item.front() != '(' || item.back() != ')')
        raise(ErrorCode::parse_error, "pwl point must look like (t,y)");
      item = item.substr(1, item.size() - 2);
      const auto comma = item.find(',');
      if (comma == std::string_view::npos) raise(ErrorCode::parse_error, "pwl point must look like (t,y)");
      pts.emplace_back(parse_real(item.substr(0, comma)), parse_real(item.substr(comma + 1)));
      if (semi == std::string_view::npos) break;
      pos = semi + 1;
    }
    return make_pwl_density(pts);
  }
  raise(ErrorCode::parse_error, "unknown Young spec '" + std::string(spec) + "'");
}

AppendixChi::AppendixChi(int kmax) {
  if (kmax < 1) raise(ErrorCode::range_error, "kmax must be at least 1");
  if (kmax > kAppendixExactK) raise(ErrorCode::range_error, "(k+3)! is not exact in double beyond k = 14");
  a_.push_back(1.0);
  double fact = 24.0;
  for (int k = 1; k <= kmax + 1; ++k) {
    a_.push_back(fact);
    fact *= static_cast<double>(k + 4);
  }
}

double AppendixChi::value(double s) const {
  if (s <= 0.0) return kInf;
  if (s <= 1.0) return 1.0 - std::log(s);
  for (std::size_t k = 0; k + 1 < a_.size(); ++k) {
    const double top = std::ldexp(1.0, -static_cast<int>(k));
    if (s <= a_[k] + 1.0) return top - 0.5 * top * (s - a_[k]);
    if (s <= a_[k + 1]) return 0.5 * top;
  }
  raise(ErrorCode::range_error, "chi evaluated beyond the tabulated a_k");
}

double AppendixChi::integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (t <= 1.0) return 2.0 * t - t * std::log(t);
  double sum = 2.0;
  for (std::size_t k = 0; k + 1 < a_.size(); ++k) {
    const double top = std::ldexp(1.0, -static_cast<int>(k));
    const double r = std::min(t, a_[k] + 1.0) - a_[k];
    sum += top * r - 0.25 * top * r * r;
    if (t <= a_[k] + 1.0) return sum;
    sum += 0.5 * top * (std::min(t, a_[k + 1]) - (a_[k] + 1.0));
    if (t <= a_[k + 1]) return sum;
  }
  raise(ErrorCode::range_error, "chi integrated beyond the tabulated a_k");
}

Delta2Report check_delta2(const YoungFunction& y, const LogGrid& grid, double threshold) {
  grid.validate();
  const auto ts = grid.values();
  const auto ratios = parallel_map<double>(ts.size(), [&](std::size_t i) {
    const double hi = y.Phi(2.0 * ts[i]), lo = y.Phi(ts[i]);
    if (std::isinf(hi)) return kInf;
    if (lo == 0.0) return hi == 0.0 ? 0.0 : kInf;
    return hi / lo;
  });
  Delta2Report rep;
  rep.grid = grid;
  rep.threshold = threshold;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (ratios[i] > ratios[arg]) arg = i;
  rep.worst_ratio = ratios[arg];
  rep.holds = ratios[arg] <= threshold;
  if (rep.holds)
    rep.c_min = ratios[arg];
  else
    rep.witness_t = ts[arg];
  return rep;
}

std::vector<SConvexSample> s_convex_samples(double s, const LogGrid& xy, int alpha_steps) {
  if (!(s > 0.0 && s <= 1.0)) raise(ErrorCode::invalid_argument, "s must lie in (0, 1]");
  const auto pts = xy.values();
  std::vector<SConvexSample> out;
  for (int j = 1; j <= alpha_steps; ++j) {
    const double theta = static_cast<double>(j) / (alpha_steps + 1);
    const double alpha = std::pow(theta, 1.0 / s), beta = std::pow(1.0 - theta, 1.0 / s);
    for (double x : pts)
      for (double y : pts) out.push_back({alpha, beta, x, y});
  }
  return out;
}

SConvexReport check_s_convex(const YoungFunction& y, double s, const std::vector<SConvexSample>& samples) {
  if (!(s > 0.0 && s <= 1.0)) raise(ErrorCode::invalid_argument, "s must lie in (0, 1]");
  SConvexReport rep;
  rep.samples = samples.size();
  for (const auto& q : samples) {
    const double rhs = std::pow(q.alpha, s) * y.Phi(q.x) + std::pow(q.beta, s) * y.Phi(q.y);
    const double slack = rhs - y.Phi(q.alpha * q.x + q.beta * q.y);
    const double scaled = slack / std::max(1.0, std::abs(rhs));
    if (scaled < rep.worst_slack) {
      rep.worst_slack = scaled;
      rep.worst = q;
    }
  }
  rep.holds = rep.worst_slack >= -1e-12;
  return rep;
}

}  // namespace orliczkit
