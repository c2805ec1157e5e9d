// Acceptance run: one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orliczkit/conditions.hpp"
#include "orliczkit/errors.hpp"
#include "orliczkit/funcspace.hpp"
#include "orliczkit/operators.hpp"
#include "orliczkit/verify.hpp"
#include "orliczkit/young.hpp"

using namespace orliczkit;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) note = what;
    pass = false;
  }
};

YoungFunction Y(const std::string& s) { return parse_young_spec(s); }

std::string st(Status s) { return to_string(s); }

std::vector<StepFunction> corpus(int count, std::uint64_t seed, Domain d) {
  Corpus c;
  c.count = count;
  c.seed = seed;
  c.domain = d;
  return c.members();
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

Outcome conjugacy() {
  Outcome o;
  double worst = 0.0;
  for (std::string spec : {"power:r=1.5", "power:r=2", "power:r=3", "plog:r=2,a=1"}) {
    const auto y = Y(spec);
    const auto psi = y.complementary();
    const auto ts = oracle::log_grid(1e-3, 1e3, 49);
    const auto want = oracle::legendre([&](double x) { return y.Phi(x); }, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double t = ts[i], v = psi.Phi(t);
      worst = std::max(worst, oracle::rel(v, want[i]));
      o.require(oracle::rel(v, want[i]) < 1e-6, spec + " Legendre mismatch at t=" + fmt(t));
      o.require(t / 2.0 * y.phi_inv(t / 2.0) <= v && v <= t * y.phi_inv(t), spec + " sandwich at t=" + fmt(t));
    }
  }
  if (o.pass) o.note = "max rel err " + fmt(worst);
  return o;
}

Outcome gauge_suite() {
  Outcome o;
  const auto phi = Y("power:r=1.5");
  const PowerWeight w{0.5, 1.0, Domain::line};
  const auto fs = corpus(200, 7, Domain::line);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto& f = fs[i];
    const auto& g = fs[(i + 1) % fs.size()];
    const double rf = gauge(phi, f, w).value;
    const std::string at = " (member " + std::to_string(i) + ")";
    o.require(rf > 0.0 && gauge(phi, f.scaled(-1.0), w).value == rf, "1: positivity/symmetry" + at);
    double prev = 0.0;
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double v = gauge(phi, f.scaled(c), w).value;
      o.require(v >= prev, "2: monotone in scalar" + at);
      prev = v;
    }
    o.require(gauge(phi, add(f, g), w).value <= (rf + gauge(phi, g, w).value) * (1.0 + 1e-12), "3: triangle" + at);
    prev = 0.0;
    for (double n : {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e4}) {
      const double v = gauge(phi, f.truncated(-n, n), w).value;
      o.require(v >= prev * (1.0 - 1e-12), "4: monotone convergence" + at);
      prev = v;
    }
    o.require(oracle::rel(prev, rf) < 1e-12, "4: limit" + at);
  }
  o.require(std::isfinite(gauge(phi, StepFunction({{-3.0, 5.0, 1.0}}, Domain::line), w).value), "5: bounded set");
  o.require(gauge(phi, StepFunction({{-3.0, 5.0, 0.0}}, Domain::line), w).value == 0.0, "5: zero function");

  const double unit = gauge(Y("power:r=1"), StepFunction({{0.0, 1.0, 1.0}}), PowerWeight{1.0}).value;
  o.require(std::abs(unit - std::sqrt(0.5)) <= 1e-9, "gauge(t, chi, 1) = " + fmt(unit));

  double dev = 0.0;
  const auto p2 = Y("power:r=2");
  for (double gm : {-0.5, 0.0, 1.0, 2.0}) {
    const PowerWeight wg{gm};
    const double delta = 1.0 / (1.0 + gm);
    for (const auto& f : corpus(10, 5, Domain::half_line))
      for (double eps : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double direct = gauge(p2, f, wg, eps).value;
        const double dilated = gauge(p2, dilate(f, std::pow(eps, -delta)), wg).value;
        dev = std::max(dev, std::abs(direct - dilated) / (1.0 + dilated));
      }
  }
  o.require(dev <= 1e-9, "eps-collapse deviation " + fmt(dev));
  if (o.pass) o.note = "gauge(t, chi, 1) = " + fmt(unit) + ", eps-collapse deviation " + fmt(dev);
  return o;
}

Outcome operator_oracles() {
  Outcome o;
  const StepFunction unit({{0.0, 1.0, 1.0}}), unit_l({{0.0, 1.0, 1.0}}, Domain::line),
      sym({{-1.0, 1.0, 1.0}}, Domain::line);
  const auto p1 = hardy_P(1.0, unit);
  const auto q1 = hardy_Q(1.0, unit);
  const auto m = maximal(unit_l);
  const auto h = hilbert(sym);
  const double pi = std::numbers::pi;
  double worst = 0.0;
  for (double t : oracle::log_grid(1e-3, 1e3, 50)) {
    if (std::abs(t - 1.0) < 1e-12) continue;
    worst = std::max(worst, std::abs(p1(t) - std::min(1.0, 1.0 / t)));
    worst = std::max(worst, std::abs(q1(t) - (t < 1.0 ? (1.0 - t) / t : 0.0)));
    worst = std::max(worst, std::abs(m(t) - (t < 1.0 ? 1.0 : 1.0 / t)));
    worst = std::max(worst, std::abs(m(-t) - 1.0 / (1.0 + t)));
    worst = std::max(worst, std::abs(h(t) - std::log(std::abs(t + 1.0) / std::abs(t - 1.0)) / pi));
  }
  o.require(worst <= 1e-10, "closed-form error " + fmt(worst));
  auto probes = [](bool line) {
    auto ts = oracle::log_grid(1e-3, 1e3, 50);
    if (line)
      for (std::size_t i = 0, n = ts.size(); i < n; ++i) ts.push_back(-ts[i]);
    return ts;
  };
  double dev = 0.0;
  const std::pair<const char*, const StepFunction*> cases[] = {
      {"P:p=1", &unit}, {"Q:q=1", &unit}, {"M", &unit_l}, {"H", &sym}};
  for (const auto& [tag, f] : cases) {
    const auto op = parse_operator(tag);
    const bool line = op.kind == OpKind::M || op.kind == OpKind::H;
    for (double lambda : {1.0 / 3.0, 2.0, 5.0}) dev = std::max(dev, check_dilation_commute(op, *f, lambda, probes(line)));
  }
  o.require(dev <= 1e-10, "dilation deviation " + fmt(dev));
  if (o.pass) o.note = "closed-form error " + fmt(worst) + ", dilation deviation " + fmt(dev);
  return o;
}

Outcome hardy_regime() {
  Outcome o;
  const auto hold = check_bk_Pp(Y("power:r=2"), Y("power:r=2"), 1.0, 0.0);
  o.require(hold.status == Status::holds && std::isfinite(hold.c_min), "bk-p power:r=2 is " + st(hold.status));
  Corpus c;
  c.count = 100;
  const auto pred = verify_condition_predicts(parse_operator("P:p=1"), Y("power:r=2"), Y("power:r=2"), 0.0, c);
  o.require(pred.passed, "predicts failed, worst slack " + fmt(pred.worst_ratio));
  o.require(std::abs(pred.K - 8.0 * hold.c_min) <= 1e-12 * pred.K, "K != 8 c_min");
  const auto div = check_bk_Pp(Y("power:r=1"), Y("power:r=1"), 1.0, 0.0);
  o.require(div.status == Status::divergent, "bk-p power:r=1 is " + st(div.status));
  const auto fam = witness_family(parse_operator("P:p=1"), Y("power:r=1"), Y("power:r=1"), 0.0, 10);
  o.require(fam.family.rfind("chi(2^-j,1)", 0) == 0, "witness family is " + fam.family);
  o.require(fam.monotone && fam.ratios.size() == 11, "witness ratios not increasing");
  if (o.pass)
    o.note = "c_min " + fmt(hold.c_min) + ", worst slack " + fmt(pred.worst_ratio) + ", witness ratio " +
             fmt(fam.ratios.front()) + " -> " + fmt(fam.ratios.back());
  return o;
}

Outcome muckenhoupt() {
  Outcome o;
  std::string seen;
  const auto phi = Y("power:r=2");
  for (double g : {0.0, 0.5, 0.9, 1.0, 1.5}) {
    const auto s = check_maximal_condition(phi, g).status;
    const bool want_holds = g < 1.0;
    o.require(want_holds ? s == Status::holds : s != Status::holds, "gamma=" + fmt(g) + " is " + st(s));
    seen += (seen.empty() ? "" : ", ") + fmt(g) + ":" + st(s);
  }
  if (o.pass) o.note = seen;
  return o;
}

std::string verdict(const std::function<ConditionReport()>& f) {
  try {
    return st(f().status);
  } catch (const Error& e) {
    return std::string("error:") + e.what();
  }
}

Outcome duality() {
  Outcome o;
  const char* fam[] = {"power:r=1.5", "power:r=2", "power:r=3", "plog:r=2,a=1",
                       "pwl-density:(0,0);(1,5);(2,5);(3,10)"};
  const double qs[] = {1.25, 1.5, 2.0, 3.0, 4.0, 6.0};
  const double gs[] = {-0.5, 0.0, 0.25, 0.5, 1.0, 2.0};
  std::mt19937_64 rng(2024);
  int holds = 0, fails = 0, divergent = 0;
  for (int i = 0; i < 20; ++i) {
    const std::string a = fam[rng() % 5];
    const std::string b = fam[rng() % 5];
    const double q = qs[rng() % 6];
    const double g = gs[rng() % 6];
    const auto phi1 = Y(a), phi2 = Y(b);
    const auto vq = verdict([&] { return check_bk_Qq(phi1, phi2, q, g); });
    const auto vp = verdict([&] {
      return check_bk_Pp_inv(phi2.complementary(), phi1.complementary(), 1.0 - 1.0 / q + g, g);
    });
    o.require(vq == vp && vq.rfind("error:", 0) != 0,
              "(" + a + ", " + b + ", q=" + fmt(q) + ", gamma=" + fmt(g) + "): Q " + vq + " vs P " + vp);
    holds += vq == "holds";
    fails += vq == "fails";
    divergent += vq == "divergent";
  }
  if (o.pass)
    o.note = "20 tuples agree (" + std::to_string(holds) + " holds, " + std::to_string(fails) + " fails, " +
             std::to_string(divergent) + " divergent)";
  return o;
}

Outcome counterexample() {
  Outcome o;
  const auto rep = counterexample_report(1.0, 8);
  for (const char* c : {"i_mean_exceeds", "ii_four_chi_bound", "iii_star_induction", "iv_aphi_fails_bk_holds"})
    o.require(rep.clauses[c]["holds"].get<bool>(), std::string("clause ") + c);
  const AppendixChi chi(8);
  o.require(chi.integral(24.0) == 13.75, "int_0^24 chi = " + fmt(chi.integral(24.0)));
  const double mean = rep.clauses["i_mean_exceeds"]["rows"][0]["mean"].get<double>();
  o.require(mean == 13.75 / 24.0, "mean(a_1) = " + fmt(mean));
  o.require(mean > 0.5 && chi.value(24.0) == 0.5, "mean(a_1) not above chi(24)");
  const auto& iv = rep.clauses["iv_aphi_fails_bk_holds"];
  o.require(iv["aphi"]["status"] == "fails" && iv["bk"]["status"] == "holds", "aphi/bk verdicts");
  o.require(rep.passed, "report not passed");
  if (o.pass) o.note = "mean(a_1) = 13.75/24, aphi fails, bk holds (c=" + fmt(iv["bk"]["c_min"].get<double>()) + ")";
  return o;
}

Outcome weak_strong_fourweight() {
  Outcome o;
  const FourWeights hardy{PowerWeight{0.0}, PowerWeight{0.0}, PowerWeight{0.0}, PowerWeight{-1.0}};
  Corpus c;
  c.count = 100;
  const auto ws = verify_weak_strong(Y("power:r=2"), Y("power:r=2"), hardy, c);
  o.require(ws.details["weak_le_strong"].get<bool>(), "weak > strong");
  o.require(ws.details["dyadic_bound_8K"].get<bool>(), "dyadic 8K bound");
  o.require(ws.passed, "weak/strong suite failed");
  const FourWeights weighted{PowerWeight{0.5}, PowerWeight{0.0}, PowerWeight{0.5}, PowerWeight{-1.0}};
  int points = 0;
  for (const auto& W : {hardy, weighted}) {
    const LogGrid xs;
    const LogGrid ls{1e-2, 1e2, 9};
    const auto r = check_fourweight_condition(Y("power:r=2"), Y("power:r=2"), W, xs, ls);
    o.require(r.details["forms_agree"].get<bool>(), "fourweight forms disagree");
    o.require(r.details["cross_validated_points"].get<int>() == xs.points * ls.points, "not every grid point checked");
    points += r.details["cross_validated_points"].get<int>();
  }
  if (o.pass)
    o.note = "K = " + fmt(ws.K) + ", worst strong/bound " + fmt(ws.worst_ratio) + ", " + std::to_string(points) +
             " fourweight points cross-validated";
  return o;
}

Outcome aphi_implies_bk() {
  Outcome o;
  const char* fam[] = {"power:r=1.5", "power:r=2", "power:r=3", "plog:r=2,a=1",
                       "pwl-density:(0,0);(1,5);(2,5);(3,10)", "appendix2:gamma=1"};
  int held = 0, total = 0;
  for (const char* spec : fam) {
    const auto phi = Y(spec);
    for (double g : {0.25, 0.5, 1.0, 2.0}) {
      const PowerWeight w{g, 1.0, Domain::line};
      ++total;
      const auto a = check_aphi_general(phi, w);
      if (a.status != Status::holds) continue;
      ++held;
      const auto b = check_bk_general(phi, w);
      o.require(b.status == Status::holds,
                std::string(spec) + " gamma=" + fmt(g) + ": A_phi holds, BK " + st(b.status));
    }
  }
  if (o.pass) o.note = std::to_string(held) + " of " + std::to_string(total) + " A_phi holds, BK holds in each";
  return o;
}

std::string run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + ORLICZKIT_CLI + std::string(" ") + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int st = pclose(p);
  out += "\n<exit " + std::to_string(WIFEXITED(st) ? WEXITSTATUS(st) : -1) + ">";
  return out;
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::string> cmds = {
      "verify theorem1 --phi1 power:r=2 --phi2 power:r=2 --op P:p=1 --seed 7 --count 20",
      "verify predicts --op Q:q=2 --phi1 power:r=2 --phi2 power:r=2 --seed 9 --count 20",
      "verify weakstrong --phi1 power:r=2 --phi2 power:r=2 --seed 4 --count 20",
      "check bk-general --phi plog:r=2,a=1 --gamma 0.5 --grid-points 61",
  };
  std::size_t bytes = 0;
  for (const auto& cmd : cmds) {
    const auto serial = run_cli(cmd);
    o.require(serial.size() > 200 && serial.find("\"schema\": 1") != std::string::npos, "no report from: " + cmd);
    o.require(run_cli(cmd) == serial, "repeat differs: " + cmd);
    o.require(run_cli("--threads 4 " + cmd) == serial, "--threads 4 differs: " + cmd);
    o.require(run_cli(cmd, "ORLICZKIT_THREADS=4") == serial, "ORLICZKIT_THREADS=4 differs: " + cmd);
    bytes += serial.size();
  }
  if (o.pass) o.note = std::to_string(cmds.size()) + " commands, " + std::to_string(bytes) + " bytes identical x4";
  return o;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no limit
    Outcome (*run)();
  };
  const Criterion all[] = {
      {1, "conjugacy suite", 5.0, conjugacy},
      {2, "gauge suite", 30.0, gauge_suite},
      {3, "operator oracles", 0.0, operator_oracles},
      {4, "Hardy regime", 60.0, hardy_regime},
      {5, "Muckenhoupt boundary", 0.0, muckenhoupt},
      {6, "duality", 0.0, duality},
      {7, "counterexample", 10.0, counterexample},
      {8, "weak/strong and four-weight forms", 0.0, weak_strong_fourweight},
      {9, "A_phi implies BK", 0.0, aphi_implies_bk},
      {10, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      if (o.pass) o.note = "over the " + fmt(c.limit_s) + " s budget";
      o.pass = false;
    }
    failed += !o.pass;
    std::printf("criterion %2d %-34s %s  (%.2f s)  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.note.c_str());
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
