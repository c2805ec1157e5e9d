#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "orliczkit/config.hpp"
#include "orliczkit/errors.hpp"

using namespace orliczkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// env is a shell prefix such as "ORLICZKIT_THREADS=4".
Run run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + ORLICZKIT_CLI + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("orliczkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
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

}  // namespace

TEST_CASE("cli: gauge of the unit indicator") {
  const auto fn = write_file("unit.json", R"([{"a":0,"b":1,"c":1}])");
  const auto r = run_cli("gauge --phi power:r=1 --gamma 1 --fn " + fn);
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["values"]["value"].get<double>() - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(j["schema"] == 1);
  CHECK(j["tool_version"] == "0.1.0");
  CHECK(j["command"] == "gauge");
  CHECK(j["params"]["phi"] == "power:r=1");
  CHECK(j["params"]["config"]["grid"]["points"] == 241);
}

TEST_CASE("cli: exit codes follow the verdict") {
  const auto holds = run_cli("check maximal --phi power:r=2 --gamma 0.5");
  CHECK(holds.code == 0);
  CHECK(json::parse(holds.out)["status"] == "holds");

  const auto fails = run_cli("check aphi --phi appendix2:gamma=1 --gamma 1");
  CHECK(fails.code == 2);
  const auto j = json::parse(fails.out);
  CHECK(j["status"] == "fails");
  CHECK(j["witness"].is_object());
  CHECK(j["witness"]["rule"] == "unbounded-growth");

  const auto div = run_cli("check bk-p --phi1 power:r=1 --phi2 power:r=1 --p 1 --gamma 0");
  CHECK(div.code == 2);
  CHECK(json::parse(div.out)["status"] == "divergent");
}

TEST_CASE("cli: usage and parse errors exit 1") {
  const auto fn = write_file("unit.json", R"([{"a":0,"b":1,"c":1}])");
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("check").code == 1);
  CHECK(run_cli("check bogus").code == 1);
  CHECK(run_cli("check maximal --phi power:r=2 --nonsense 3").code == 1);
  CHECK(run_cli("gauge --phi nope:r=1 --fn " + fn).code == 1);
  CHECK(run_cli("gauge --phi power:r=2 --fn /nonexistent/f.json").code == 1);
  CHECK(run_cli("--format xml check maximal --phi power:r=2").code == 1);
  CHECK(run_cli("--grid-points 2 check maximal --phi power:r=2").code == 1);
  const auto bad = write_file("bad.json", R"([{"a":0,"b":1}])");
  CHECK(run_cli("gauge --phi power:r=2 --fn " + bad).code == 1);
}

TEST_CASE("cli: apply and young show") {
  const auto fn = write_file("unit.json", R"([{"a":0,"b":1,"c":1}])");
  const auto r = run_cli("apply --op P:p=1 --fn " + fn + " --at 0.5,2,4");
  REQUIRE(r.code == 0);
  const auto rows = json::parse(r.out)["values"]["profile"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["value"].get<double>() == doctest::Approx(1.0));
  CHECK(rows[1]["value"].get<double>() == doctest::Approx(0.5));
  CHECK(rows[2]["value"].get<double>() == doctest::Approx(0.25));

  const auto y = run_cli("young show --phi power:r=3 --at 2");
  REQUIRE(y.code == 0);
  const auto row = json::parse(y.out)["values"]["table"][0];
  CHECK(row["Phi"].get<double>() == doctest::Approx(8.0 / 3.0));
  // Psi(t) = t^(3/2) / (3/2)
  CHECK(row["Psi"].get<double>() == doctest::Approx(std::pow(2.0, 1.5) / 1.5));
}

TEST_CASE("cli: config precedence") {
  const auto cfg = write_file("cfg.json", R"({"grid": {"points": 21, "lo": 0.01, "hi": 100}})");
  const auto from_file = json::parse(run_cli("--config " + cfg + " check maximal --phi power:r=2 --gamma 0.5").out);
  CHECK(from_file["grid"]["points"] == 21);
  CHECK(from_file["params"]["config"]["grid"]["lo"] == 0.01);
  const auto flag = json::parse(
      run_cli("--config " + cfg + " --grid-points 31 check maximal --phi power:r=2 --gamma 0.5").out);
  CHECK(flag["grid"]["points"] == 31);
  CHECK(flag["params"]["config"]["grid"]["hi"] == 100.0);

  const auto broken = write_file("broken.json", R"({"grid": {"points": )");
  CHECK(run_cli("--config " + broken + " check maximal --phi power:r=2").code == 1);
  const auto unknown = write_file("unknown.json", R"({"gird": {}})");
  CHECK(run_cli("--config " + unknown + " check maximal --phi power:r=2").code == 1);
  CHECK(run_cli("check maximal --phi power:r=2", "ORLICZKIT_THREADS=zero").code == 1);
}

TEST_CASE("config parsing") {
  const RunConfig d = load_config("");
  CHECK(d.grid.points == 241);
  CHECK(d.grid.lo == 1e-6);
  CHECK(d.grid.hi == 1e6);
  CHECK(d.threads >= 1);
  const RunConfig c = parse_config(R"({"tolerances": {"c_hi": 1000}, "threads": 3, "format": "csv"})");
  CHECK(c.search.hi == 1000.0);
  CHECK(c.threads == 3);
  CHECK(c.format == "csv");
  CHECK(c.grid.points == 241);
  CHECK(code_of([] { parse_config("{"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config(R"({"grid": {"points": 2}})"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config(R"({"grid": {"lo": 5, "hi": 1}})"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config(R"({"threads": "many"})"); }) == ErrorCode::config_error);
  CHECK(code_of([] { load_config("/nonexistent/cfg.json"); }) == ErrorCode::config_error);
  CHECK(c.echo().dump() == parse_config(R"({"threads": 1, "tolerances": {"c_hi": 1000}, "format": "csv"})").echo().dump());
}

TEST_CASE("cli: --json path and csv output") {
  const auto out = (scratch_dir() / "report.json").string();
  const auto to_file = run_cli("--json " + out + " check maximal --phi power:r=2 --gamma 0.5");
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  CHECK(read_file(out) == run_cli("check maximal --phi power:r=2 --gamma 0.5").out);

  const auto csv = run_cli("--format csv check maximal --phi power:r=2 --gamma 0.5");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("c,t\n", 0) == 0);
}

TEST_CASE("cli: output does not depend on threads or ISA") {
  const std::string cmd = "verify theorem1 --phi1 power:r=2 --phi2 power:r=2 --op P:p=1 --seed 3 --count 4";
  const auto serial = run_cli(cmd);
  REQUIRE(serial.code == 0);
  CHECK(run_cli("--threads 4 " + cmd).out == serial.out);
  CHECK(run_cli(cmd, "ORLICZKIT_THREADS=4").out == serial.out);
  CHECK(run_cli(cmd, "ORLICZKIT_SIMD=scalar").out == serial.out);
  CHECK(run_cli(cmd).out == serial.out);

  const std::string bk = "check bk-p --phi1 power:r=2 --phi2 power:r=2 --p 1 --gamma 0 --grid-points 41";
  const auto a = run_cli(bk);
  CHECK(a.code == 0);
  CHECK(run_cli(bk, "ORLICZKIT_SIMD=scalar ORLICZKIT_THREADS=4").out == a.out);
}
