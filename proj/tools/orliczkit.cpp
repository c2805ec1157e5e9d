// orliczkit command-line front end.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orliczkit/conditions.hpp"
#include "orliczkit/config.hpp"
#include "orliczkit/errors.hpp"
#include "orliczkit/funcspace.hpp"
#include "orliczkit/operators.hpp"
#include "orliczkit/parallel.hpp"
#include "orliczkit/report.hpp"
#include "orliczkit/verify.hpp"
#include "orliczkit/young.hpp"

using namespace orliczkit;
using nlohmann::json;

namespace {

struct Args {
  std::string config_path, json_path, format;
  std::optional<int> threads, grid_points;
  std::optional<double> grid_lo, grid_hi;

  std::string phi, phi1, phi2, op, fn, domain = "r+", at;
  double gamma = 0.0, p = 1.0, q = 1.0, eps = 1.0, s = 1.0;
  std::optional<double> s_opt;
  std::vector<std::string> intervals;
  double t_gamma = 0.0, u_gamma = 0.0, v_gamma = 0.0, w_gamma = -1.0;
  std::uint64_t seed = 1;
  int count = 100;
  int kmax = 8;
};

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    raise(ErrorCode::parse_error, "not a number: " + text);
  }
  if (used != text.size()) raise(ErrorCode::parse_error, "not a number: " + text);
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) raise(ErrorCode::parse_error, "empty list");
  return out;
}

Interval parse_interval(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2 || !(v[1] > v[0])) raise(ErrorCode::parse_error, "interval must be a,b with a < b: " + text);
  return {v[0], v[1]};
}

json grid_echo(const LogGrid& g) { return {{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}, {"spacing", "log"}}; }

json young_show(const YoungFunction& y, const Args& a, const RunConfig& cfg) {
  std::vector<double> ts = a.at.empty() ? LogGrid{cfg.grid.lo, cfg.grid.hi, 13}.values() : parse_list(a.at);
  const bool young = y.kind() == YoungKind::young;
  std::optional<YoungFunction> psi;
  if (young) psi = y.complementary();
  json rows = json::array();
  for (double t : ts) {
    json row = {{"t", t}, {"Phi", y.Phi(t)}, {"phi", y.phi(t)}};
    if (y.monotone()) row["phi_inv"] = y.phi_inv(t);
    if (psi) row["Psi"] = psi->Phi(t);
    rows.push_back(row);
  }
  json segs = json::array();
  for (const auto& g : y.segments()) segs.push_back({{"lo", g.lo}, {"hi", g.hi}, {"form", g.form->describe()}});
  json values = {{"kind", young ? "young" : "general"}, {"monotone", y.monotone()}, {"segments", segs}, {"table", rows}};
  if (psi) values["complementary"] = psi->spec();
  return make_report("young show", {{"phi", y.spec()}}, "success", nullptr, nullptr, values, grid_echo(cfg.grid),
                     json::object());
}

PowerWeight weight_for(double gamma, Domain d) { return {gamma, 1.0, d}; }

int exit_for(const std::string& status) {
  return status == "holds" || status == "success" || status == "passed" ? 0 : 2;
}

void emit(const json& report, const RunConfig& cfg) {
  const std::string text = cfg.format == "csv" ? render_csv(report) : render_json(report);
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) raise(ErrorCode::config_error, "cannot write " + cfg.output);
  out << text;
}

json verify_report(const std::string& command, const EquivalenceReport& r, const RunConfig& cfg) {
  json witness = nullptr;
  if (!r.passed) {
    witness = json::object();
    if (!r.failing_member.is_null()) witness["failing_member"] = r.failing_member;
    if (r.details.contains("witness_family")) witness["witness_family"] = r.details["witness_family"];
  }
  json params = r.params;
  params["config"] = cfg.echo();
  return make_report(command, params, r.passed ? "passed" : "failed", nullptr, witness, to_json(r), r.corpus,
                     {{"eps_collapse", 1e-6}, {"inequality_rel", 1e-9}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orliczkit: power-weighted Orlicz classes, operators and integral conditions"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--config", a.config_path, "JSON config file");
  app.add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--json", a.json_path, "write the report to this path");
  app.add_option("--format", a.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--grid-lo", a.grid_lo, "grid lower end");
  app.add_option("--grid-hi", a.grid_hi, "grid upper end");
  app.add_option("--grid-points", a.grid_points, "grid size");

  auto* young = app.add_subcommand("young", "Young functions");
  young->require_subcommand(1);
  auto* show = young->add_subcommand("show", "evaluate a Young spec");
  show->add_option("--phi", a.phi, "Young spec")->required();
  show->add_option("--at", a.at, "comma list of t values");

  auto* gauge_cmd = app.add_subcommand("gauge", "weighted gauge of a step function");
  gauge_cmd->add_option("--phi", a.phi)->required();
  gauge_cmd->add_option("--gamma", a.gamma);
  gauge_cmd->add_option("--fn", a.fn, "step function JSON file")->required();
  gauge_cmd->add_option("--domain", a.domain)->check(CLI::IsMember({"r+", "r"}));
  gauge_cmd->add_option("--eps", a.eps);
  gauge_cmd->add_option("--s", a.s_opt, "s-gauge exponent in (0,1]");

  auto* apply_cmd = app.add_subcommand("apply", "evaluate an operator on a step function");
  apply_cmd->add_option("--op", a.op, "P:p=<r>|Q:q=<r>|I|M|H")->required();
  apply_cmd->add_option("--fn", a.fn)->required();
  apply_cmd->add_option("--at", a.at)->required();
  apply_cmd->add_option("--domain", a.domain)->check(CLI::IsMember({"r+", "r"}));

  auto* check = app.add_subcommand("check", "integral conditions");
  check->require_subcommand(1);
  auto two_phi = [&](CLI::App* c) {
    c->add_option("--phi1", a.phi1)->required();
    c->add_option("--phi2", a.phi2)->required();
    c->add_option("--gamma", a.gamma);
  };
  auto* bk_p = check->add_subcommand("bk-p", "P_p condition");
  two_phi(bk_p);
  bk_p->add_option("--p", a.p)->required();
  auto* bk_p_remark = check->add_subcommand("bk-p-remark", "P_p condition, reformulated regimes");
  two_phi(bk_p_remark);
  bk_p_remark->add_option("--p", a.p)->required();
  auto* bk_q = check->add_subcommand("bk-q", "Q_q condition");
  two_phi(bk_q);
  bk_q->add_option("--q", a.q)->required();
  auto one_phi = [&](const char* name, const char* what) {
    auto* c = check->add_subcommand(name, what);
    c->add_option("--phi", a.phi)->required();
    c->add_option("--gamma", a.gamma);
    return c;
  };
  auto* maximal_c = one_phi("maximal", "maximal operator condition");
  auto* hilbert_c = one_phi("hilbert", "Hilbert transform conditions");
  auto* aphi_c = one_phi("aphi", "A_phi for power weights, pair form");
  auto* aphi_g = one_phi("aphi-general", "A_phi on intervals");
  aphi_g->add_option("--interval", a.intervals, "a,b (repeatable)");
  auto* bk_g = one_phi("bk-general", "general BK condition on intervals");
  bk_g->add_option("--interval", a.intervals, "a,b (repeatable)");
  auto* delta2_c = check->add_subcommand("delta2", "Delta_2 condition");
  delta2_c->add_option("--phi", a.phi)->required();
  auto* four = check->add_subcommand("fourweight", "four-weight condition for I");
  two_phi(four);
  four->add_option("--t", a.t_gamma, "exponent of t(y) = y^g");
  four->add_option("--u", a.u_gamma, "exponent of u");
  four->add_option("--v", a.v_gamma, "exponent of v");
  four->add_option("--w", a.w_gamma, "exponent of w");

  auto* verify = app.add_subcommand("verify", "empirical verification suites");
  verify->require_subcommand(1);
  auto corpus_opts = [&](CLI::App* c) {
    c->add_option("--seed", a.seed);
    c->add_option("--count", a.count)->check(CLI::NonNegativeNumber);
  };
  auto* theorem1 = verify->add_subcommand("theorem1", "gauge and modular inequalities");
  two_phi(theorem1);
  theorem1->add_option("--op", a.op)->required();
  corpus_opts(theorem1);
  auto* weakstrong = verify->add_subcommand("weakstrong", "weak-type and strong modular inequalities for I");
  two_phi(weakstrong);
  weakstrong->add_option("--t", a.t_gamma);
  weakstrong->add_option("--u", a.u_gamma);
  weakstrong->add_option("--v", a.v_gamma);
  weakstrong->add_option("--w", a.w_gamma);
  corpus_opts(weakstrong);
  auto* predicts = verify->add_subcommand("predicts", "condition against empirical modular inequality");
  predicts->add_option("--op", a.op)->required();
  predicts->add_option("--phi1", a.phi1)->required();
  predicts->add_option("--phi2", a.phi2);
  predicts->add_option("--gamma", a.gamma);
  corpus_opts(predicts);
  auto* counter = verify->add_subcommand("counterexample", "A_phi without BK");
  counter->add_option("--gamma", a.gamma)->required();
  counter->add_option("--kmax", a.kmax);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    RunConfig cfg = load_config(a.config_path);
    if (a.threads) cfg.threads = *a.threads;
    if (!a.json_path.empty()) cfg.output = a.json_path;
    if (!a.format.empty()) cfg.format = a.format;
    if (a.grid_lo) cfg.grid.lo = *a.grid_lo;
    if (a.grid_hi) cfg.grid.hi = *a.grid_hi;
    if (a.grid_points) cfg.grid.points = *a.grid_points;
    cfg.validate();
    set_worker_count(cfg.threads);
    set_search_defaults(cfg.search);
    const Domain dom = parse_domain(a.domain);

    json report;
    auto condition = [&](const std::string& cmd, const ConditionReport& r) {
      report = report_from_condition(cmd, r);
      report["params"]["config"] = cfg.echo();
    };
    if (show->parsed()) {
      report = young_show(parse_young_spec(a.phi), a, cfg);
      report["params"]["config"] = cfg.echo();
    } else if (gauge_cmd->parsed()) {
      const auto phi = parse_young_spec(a.phi);
      const auto f = load_step_function(a.fn, dom);
      const auto w = weight_for(a.gamma, dom);
      const GaugeResult g = a.s_opt ? gauge_s(phi, f, w, *a.s_opt) : gauge(phi, f, w, a.eps);
      json params = {{"phi", phi.spec()},         {"gamma", a.gamma}, {"domain", to_string(dom)},
                     {"fn", json::parse(step_function_json(f))}, {"config", cfg.echo()}};
      if (a.s_opt)
        params["s"] = *a.s_opt;
      else
        params["eps"] = a.eps;
      report = make_report("gauge", params, "success", nullptr, nullptr,
                           {{"value", g.value}, {"lo", g.lo}, {"hi", g.hi}, {"iterations", g.iterations},
                            {"residual", g.residual}},
                           json::object(), {{"bisection_rel", 1e-15}, {"max_iterations", 200}});
    } else if (apply_cmd->parsed()) {
      const auto op = parse_operator(a.op);
      const Domain d = op.kind == OpKind::M || op.kind == OpKind::H ? Domain::line : dom;
      const auto f = load_step_function(a.fn, d);
      const auto g = apply(op, f);
      json rows = json::array();
      for (double x : parse_list(a.at)) {
        const double v = (*g)(x);
        rows.push_back({{"x", x}, {"value", std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf")}});
      }
      report = make_report("apply",
                           {{"op", op.tag()}, {"fn", json::parse(step_function_json(f))}, {"config", cfg.echo()}},
                           "success", nullptr, nullptr, {{"profile", rows}}, json::object(), json::object());
    } else if (bk_p->parsed()) {
      condition("check bk-p", check_bk_Pp(parse_young_spec(a.phi1), parse_young_spec(a.phi2), a.p, a.gamma, cfg.grid));
    } else if (bk_p_remark->parsed()) {
      condition("check bk-p-remark",
                check_bk_Pp_remark(parse_young_spec(a.phi1), parse_young_spec(a.phi2), a.p, a.gamma, cfg.grid));
    } else if (bk_q->parsed()) {
      condition("check bk-q", check_bk_Qq(parse_young_spec(a.phi1), parse_young_spec(a.phi2), a.q, a.gamma, cfg.grid));
    } else if (maximal_c->parsed()) {
      condition("check maximal", check_maximal_condition(parse_young_spec(a.phi), a.gamma, cfg.grid));
    } else if (hilbert_c->parsed()) {
      condition("check hilbert", check_hilbert_condition(parse_young_spec(a.phi), a.gamma, cfg.grid));
    } else if (aphi_c->parsed()) {
      condition("check aphi", check_aphi_power(parse_young_spec(a.phi), a.gamma, cfg.grid));
    } else if (aphi_g->parsed() || bk_g->parsed()) {
      std::vector<Interval> qs;
      for (const auto& s : a.intervals) qs.push_back(parse_interval(s));
      const auto phi = parse_young_spec(a.phi);
      const auto w = weight_for(a.gamma, Domain::line);
      if (aphi_g->parsed())
        condition("check aphi-general", check_aphi_general(phi, w, qs, cfg.grid));
      else
        condition("check bk-general", check_bk_general(phi, w, qs, cfg.grid));
    } else if (delta2_c->parsed()) {
      const auto phi = parse_young_spec(a.phi);
      const auto d = check_delta2(phi, cfg.grid);
      json witness = nullptr;
      if (!d.holds) witness = {{"t", d.witness_t}, {"ratio", d.worst_ratio}, {"threshold", d.threshold}};
      report = make_report("check delta2", {{"phi", phi.spec()}, {"config", cfg.echo()}},
                           d.holds ? "holds" : "fails", d.holds ? json(d.c_min) : json(nullptr), witness, nullptr,
                           grid_echo(cfg.grid), {{"threshold", d.threshold}});
    } else if (four->parsed()) {
      const FourWeights W{weight_for(a.t_gamma, Domain::half_line), weight_for(a.u_gamma, Domain::half_line),
                          weight_for(a.v_gamma, Domain::half_line), weight_for(a.w_gamma, Domain::half_line)};
      condition("check fourweight",
                check_fourweight_condition(parse_young_spec(a.phi1), parse_young_spec(a.phi2), W, cfg.grid));
    } else if (theorem1->parsed()) {
      Corpus c;
      c.seed = a.seed;
      c.count = a.count;
      report = verify_report("verify theorem1",
                             verify_gauge_modular_equiv(parse_young_spec(a.phi1), parse_young_spec(a.phi2),
                                                        parse_operator(a.op), a.gamma, c),
                             cfg);
    } else if (weakstrong->parsed()) {
      Corpus c;
      c.seed = a.seed;
      c.count = a.count;
      const FourWeights W{weight_for(a.t_gamma, Domain::half_line), weight_for(a.u_gamma, Domain::half_line),
                          weight_for(a.v_gamma, Domain::half_line), weight_for(a.w_gamma, Domain::half_line)};
      report = verify_report("verify weakstrong",
                             verify_weak_strong(parse_young_spec(a.phi1), parse_young_spec(a.phi2), W, c), cfg);
    } else if (predicts->parsed()) {
      Corpus c;
      c.seed = a.seed;
      c.count = a.count;
      const auto phi1 = parse_young_spec(a.phi1);
      const auto phi2 = a.phi2.empty() ? phi1 : parse_young_spec(a.phi2);
      report = verify_report("verify predicts", verify_condition_predicts(parse_operator(a.op), phi1, phi2, a.gamma, c),
                             cfg);
    } else if (counter->parsed()) {
      const auto r = counterexample_report(a.gamma, a.kmax);
      report = make_report("verify counterexample", {{"gamma", a.gamma}, {"kmax", a.kmax}, {"config", cfg.echo()}},
                           r.passed ? "passed" : "failed", nullptr, nullptr, to_json(r), grid_echo(cfg.grid),
                           json::object());
    }
    emit(report, cfg);
    return exit_for(report["status"].get<std::string>());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
