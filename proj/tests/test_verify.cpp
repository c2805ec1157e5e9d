#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "oracles.hpp"
#include "orliczkit/errors.hpp"
#include "orliczkit/verify.hpp"

using namespace orliczkit;

namespace {

YoungFunction Y(const std::string& s) { return parse_young_spec(s); }

Corpus small_corpus(int count, std::uint64_t seed = 11) {
  Corpus c;
  c.seed = seed;
  c.count = count;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::invalid_argument;
}

FourWeights hardy_weights() {
  return {PowerWeight{0.0}, PowerWeight{0.0}, PowerWeight{0.0}, PowerWeight{-1.0}};
}

}  // namespace

TEST_CASE("corpus is reproducible and within bounds") {
  const auto a = small_corpus(50, 3).members();
  const auto b = small_corpus(50, 3).members();
  const auto c = small_corpus(50, 4).members();
  REQUIRE(a.size() == 50);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(step_function_json(a[i]) == step_function_json(b[i]));
    differs = differs || step_function_json(a[i]) != step_function_json(c[i]);
    CHECK(a[i].pieces().size() >= 1);
    CHECK(a[i].pieces().size() <= 8);
    for (const auto& p : a[i].pieces()) {
      CHECK(p.a >= 1e-3);
      CHECK(p.b <= 1e3);
      CHECK(p.a < p.b);
      CHECK(p.c >= 0.0);
      CHECK(p.c <= 10.0);
    }
  }
  CHECK(differs);
  Corpus bad;
  bad.lo = 0.0;
  CHECK_THROWS_AS(bad.members(), Error);
}

TEST_CASE("gauge_of_output closed forms") {
  // P_1 chi_(0,1) = min(1, 1/x); with Phi = t^2/2 and w = x^(1/2):
  // (eps / l) int Phi(g / l) w = eps (4/3) / l^3
  const auto g = apply(parse_operator("P:p=1"), StepFunction({{0.0, 1.0, 1.0}}));
  const PowerWeight w{0.5};
  for (double eps : {0.125, 1.0, 8.0}) {
    const auto r = gauge_of_output(Y("power:r=2"), *g, w, eps);
    CHECK(oracle::rel(r.value, std::cbrt(4.0 / 3.0 * eps)) < 1e-10);
  }
  const auto zero = apply(parse_operator("P:p=1"), StepFunction({{1.0, 2.0, 0.0}}));
  CHECK(gauge_of_output(Y("power:r=2"), *zero, w).value == 0.0);
  CHECK_THROWS_AS(gauge_of_output(Y("power:r=2"), *g, w, 0.0), Error);
}

TEST_CASE("witness family for P_1 on L^1 grows like log n") {
  const auto fam = witness_family(parse_operator("P:p=1"), Y("power:r=1"), Y("power:r=1"), 0.0, 10);
  CHECK(fam.monotone);
  REQUIRE(fam.ratios.size() == 11);
  // f_n = chi_(1/n,1): int_0^n P_1 f_n = (1 - 1/n) + (1 - 2/n) log n, mass 1 - 1/n
  for (std::size_t j = 0; j < fam.ratios.size(); ++j) {
    const double n = std::ldexp(1.0, static_cast<int>(j) + 1);
    CHECK(oracle::rel(fam.ratios[j], 1.0 + (n - 2.0) / (n - 1.0) * std::log(n)) < 1e-8);
  }
}

TEST_CASE("gauge/modular suite: Hardy regime gives finite K and C") {
  const auto rep = verify_gauge_modular_equiv(Y("power:r=2"), Y("power:r=2"), parse_operator("P:p=1"), 0.0,
                                              small_corpus(8));
  CHECK(rep.passed);
  CHECK(std::isfinite(rep.K));
  CHECK(rep.K > 0.0);
  // L^2 Hardy constant is 2; Luxemburg gauges of t^2/2 scale the same way
  CHECK(rep.C > 0.0);
  CHECK(rep.C <= 2.0 * (1.0 + 1e-9));
  CHECK(rep.details["eps_collapse_deviation"].get<double>() <= 1e-6);
  CHECK(rep.details["eps_ratio_bounded_by_C"].get<bool>());
  CHECK(rep.skipped.empty());
}

TEST_CASE("gauge/modular suite: L^1 flags unbounded growth") {
  const auto rep = verify_gauge_modular_equiv(Y("power:r=1"), Y("power:r=1"), parse_operator("P:p=1"), 0.0,
                                              small_corpus(4));
  CHECK_FALSE(rep.passed);
  CHECK(std::isinf(rep.K));
  CHECK_FALSE(rep.details["finite_K"].get<bool>());
  CHECK(rep.details["witness_family"]["monotone"].get<bool>());
  CHECK_THROWS_AS(verify_gauge_modular_equiv(Y("power:r=2"), Y("power:r=2"), parse_operator("P:p=1"), -1.0,
                                             small_corpus(1)),
                  Error);
}

TEST_CASE("gauge/modular suite reports are reproducible") {
  auto run = [] {
    return to_json(verify_gauge_modular_equiv(Y("power:r=2"), Y("power:r=2"), parse_operator("Q:q=2"), 0.0,
                                              small_corpus(3, 5)))
        .dump();
  };
  CHECK(run() == run());
}

TEST_CASE("weak/strong on the Hardy weights") {
  const auto rep = verify_weak_strong(Y("power:r=2"), Y("power:r=2"), hardy_weights(), small_corpus(6));
  CHECK(rep.passed);
  CHECK(rep.details["weak_le_strong"].get<bool>());
  CHECK(rep.details["strong_le_dyadic_sum"].get<bool>());
  CHECK(rep.details["dyadic_bound_8K"].get<bool>());
  CHECK(rep.worst_ratio <= 1.0 + 1e-9);
  CHECK(rep.C == doctest::Approx(8.0 * rep.K));
}

TEST_CASE("predicts: condition and empirical side agree") {
  SUBCASE("P_1 on L^2 holds with K = 8 c_min") {
    const auto rep =
        verify_condition_predicts(parse_operator("P:p=1"), Y("power:r=2"), Y("power:r=2"), 0.0, small_corpus(8));
    CHECK(rep.passed);
    CHECK(rep.K == doctest::Approx(8.0 * rep.C));
    CHECK(rep.C == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
    CHECK(rep.worst_ratio <= 1.0);
  }
  SUBCASE("P_1 on L^1 diverges with a growing witness") {
    const auto rep =
        verify_condition_predicts(parse_operator("P:p=1"), Y("power:r=1"), Y("power:r=1"), 0.0, small_corpus(2));
    CHECK(rep.details["condition"]["status"] == "divergent");
    CHECK(std::isinf(rep.K));
    CHECK(rep.details["witness_family"]["monotone"].get<bool>());
    CHECK(rep.passed);
  }
  SUBCASE("Q_2 on L^2: every witness has an infinite left side") {
    const auto rep =
        verify_condition_predicts(parse_operator("Q:q=2"), Y("power:r=2"), Y("power:r=2"), 0.0, small_corpus(2));
    CHECK(rep.details["condition"]["status"] == "divergent");
    CHECK(rep.details["witness_infinite_ratio"].get<bool>());
    CHECK(rep.passed);
  }
  SUBCASE("M on the line, A_2 regime") {
    const auto rep =
        verify_condition_predicts(parse_operator("M"), Y("power:r=2"), Y("power:r=2"), 0.5, small_corpus(4));
    CHECK(rep.details["condition"]["status"] == "holds");
    CHECK(rep.passed);
  }
}

TEST_CASE("counterexample: exact piecewise values") {
  const AppendixChi chi(3);
  CHECK(chi.a(0) == 1.0);
  CHECK(chi.a(1) == 24.0);
  CHECK(chi.a(2) == 120.0);
  CHECK(chi.value(1.0) == 1.0);
  CHECK(chi.value(24.0) == 0.5);
  CHECK(chi.integral(24.0) == 13.75);
  CHECK(chi.integral(24.0) / 24.0 > 0.5);
  CHECK(chi.integral(24.0) / 24.0 <= 2.0 * chi.value(24.0));
  CHECK(code_of([] { AppendixChi chi(kAppendixExactK + 1); }) == ErrorCode::range_error);
}

TEST_CASE("counterexample report") {
  const auto rep = counterexample_report(1.0, 8);
  CHECK(rep.passed);
  for (const char* c : {"i_mean_exceeds", "ii_four_chi_bound", "iii_star_induction", "iv_aphi_fails_bk_holds"})
    CHECK(rep.clauses[c]["holds"].get<bool>());
  const auto& row1 = rep.clauses["i_mean_exceeds"]["rows"][0];
  CHECK(row1["mean"].get<double>() == doctest::Approx(13.75 / 24.0).epsilon(1e-15));
  CHECK(row1["margin"].get<double>() >= 0.1 / 4.0);
  CHECK(code_of([] { counterexample_report(1.0, 20); }) == ErrorCode::range_error);
  CHECK_THROWS_AS(counterexample_report(0.0, 4), Error);
}
