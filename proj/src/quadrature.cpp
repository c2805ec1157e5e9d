#include "orliczkit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "orliczkit/errors.hpp"
#include "orliczkit/simd/kernels.hpp"

namespace orliczkit::quad {

namespace {

constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980563425, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

// Node layout: [c - h x_0, c + h x_0, c - h x_1, ..., c + h x_9, c].
struct Weights {
  std::array<double, 21> kronrod{};
  std::array<double, 21> gauss{};
};

const Weights& weights() {
  static const Weights w = [] {
    Weights r;
    for (int j = 0; j < 10; ++j) {
      r.kronrod[2 * j] = r.kronrod[2 * j + 1] = wgk[j];
      if (j % 2 == 1) r.gauss[2 * j] = r.gauss[2 * j + 1] = wg[j / 2];
    }
    r.kronrod[20] = wgk[10];
    return r;
  }();
  return w;
}

struct Interval {
  double a, b;
  Panel p;
  bool operator<(const Interval& o) const { return p.error < o.p.error; }
};

double adaptive(const Integrand& f, double a, double b, const Options& opt, int budget) {
  if (!(b > a)) return 0.0;
  std::priority_queue<Interval> heap;
  Panel first = gk21(f, a, b);
  heap.push({a, b, first});
  double total = first.value, err = first.error;
  int count = 1;
  std::vector<Interval> done;
  while (!heap.empty() && count < budget) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
    Interval top = heap.top();
    const double mid = 0.5 * (top.a + top.b);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(top.a), std::abs(top.b));
    if (!(top.b - top.a > floor) || !(mid > top.a && mid < top.b)) {
      heap.pop();
      done.push_back(top);
      continue;
    }
    heap.pop();
    Panel l = gk21(f, top.a, mid), r = gk21(f, mid, top.b);
    total += l.value + r.value - top.p.value;
    err += l.error + r.error - top.p.error;
    heap.push({top.a, mid, l});
    heap.push({mid, top.b, r});
    ++count;
  }
  // Re-sum from the leaves.
  double sum = 0.0;
  for (const auto& iv : done) sum += iv.p.value;
  while (!heap.empty()) {
    sum += heap.top().p.value;
    heap.pop();
  }
  return sum;
}

std::vector<double> cuts_inside(const std::vector<double>& breaks, double a, double b) {
  std::vector<double> pts{a};
  std::vector<double> inner;
  for (double x : breaks)
    if (x > a && x < b) inner.push_back(x);
  std::sort(inner.begin(), inner.end());
  for (double x : inner)
    if (x > pts.back()) pts.push_back(x);
  pts.push_back(b);
  return pts;
}

enum class Direction { to_zero, to_infinity };

double geometric(const Integrand& f, double anchor, Direction dir, const std::vector<double>& breaks,
                 const Options& opt) {
  constexpr double factor = 4.0;
  constexpr int max_blocks = 480;
  constexpr double stall = 1.0 - 1e-7;
  double total = 0.0, prev = 0.0;
  int stalled = 0, zeros = 0, slowing = 0;
  double edge = anchor;
  std::vector<double> mags;
  // Mean per-block decay factor over blocks [i, j).
  auto rate = [&](std::size_t i, std::size_t j) { return std::pow(mags[j] / mags[i], 1.0 / double(j - i)); };
  for (int k = 0; k < max_blocks; ++k) {
    const double next = dir == Direction::to_infinity ? edge * factor : edge / factor;
    if (!std::isfinite(next) || next < 1e-300) break;
    const double lo = std::min(edge, next), hi = std::max(edge, next);
    const double block = integrate(f, lo, hi, breaks, opt);
    edge = next;
    if (!std::isfinite(block))
      raise(ErrorCode::divergent_integral, dir == Direction::to_infinity ? "non-finite integrand in tail"
                                                                         : "non-finite integrand near 0");
    total += block;
    const double mag = std::abs(block);
    mags.push_back(mag);
    // Decay slower than any power (block sizes ~ 1/k^p): the per-block rate
    // keeps approaching 1 instead of settling.
    if (const std::size_t n = mags.size(); n == 32 || n == 64) {
      const double m1 = mags[n / 4 - 1], m2 = mags[n / 2 - 1], m3 = mags[n - 1];
      if (m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
        const double r1 = rate(n / 4 - 1, n / 2 - 1), r2 = rate(n / 2 - 1, n - 1);
        slowing = r2 >= 0.8 && r2 < 1.0 && 1.0 - r2 < 0.6 * (1.0 - r1) ? slowing + 1 : 0;
      } else {
        slowing = 0;
      }
      if (slowing == 2)
        raise(ErrorCode::divergent_integral, dir == Direction::to_infinity ? "tail decays slower than any power"
                                                                           : "integrand decays slower than any power at 0");
    }
    if (mag == 0.0) {
      if (++zeros >= 3 && k >= 8) return total;
      prev = 0.0;
      continue;
    }
    zeros = 0;
    if (prev > 0.0) {
      const double r = mag / prev;
      if (r >= stall) {
        if (++stalled >= 4 && k >= 8)
          raise(ErrorCode::divergent_integral,
                dir == Direction::to_infinity ? "tail does not decay" : "integrand not integrable at 0");
      } else {
        stalled = 0;
        const double tail = mag * r / (1.0 - r);
        if (tail <= opt.rel_tol * std::abs(total) || tail <= opt.abs_tol) return total + std::copysign(tail, block);
      }
    }
    prev = mag;
  }
  if (prev > 0.0 && stalled > 0)
    raise(ErrorCode::divergent_integral,
          dir == Direction::to_infinity ? "tail does not decay" : "integrand not integrable at 0");
  return total;
}

}  // namespace

Panel gk21(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<double, 21> fv;
  for (int j = 0; j < 10; ++j) {
    fv[2 * j] = f(c - h * xgk[j]);
    fv[2 * j + 1] = f(c + h * xgk[j]);
  }
  fv[20] = f(c);
  const Weights& w = weights();
  const double k = simd::dot(fv, w.kronrod);
  const double g = simd::dot(fv, w.gauss);
  return {k * h, std::abs((k - g) * h)};
}

double integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks, const Options& opt) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, breaks, opt);
  const auto pts = cuts_inside(breaks, a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += adaptive(f, pts[i], pts[i + 1], opt, opt.max_subintervals);
  return sum;
}

double integrate_from_zero(const Integrand& f, double b, const std::vector<double>& breaks, const Options& opt) {
  if (!(b > 0.0)) return 0.0;
  return geometric(f, b, Direction::to_zero, breaks, opt);
}

double integrate_to_infinity(const Integrand& f, double a, const std::vector<double>& breaks, const Options& opt) {
  if (std::isinf(a)) return 0.0;
  double start = a;
  double head = 0.0;
  if (!(a > 0.0)) {
    // Cover [a, 1] directly, then grow geometrically from 1.
    head = integrate(f, a, 1.0, breaks, opt);
    start = 1.0;
  }
  return head + geometric(f, start, Direction::to_infinity, breaks, opt);
}

}  // namespace orliczkit::quad
