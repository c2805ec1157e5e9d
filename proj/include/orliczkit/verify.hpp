#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orliczkit/conditions.hpp"
#include "orliczkit/funcspace.hpp"
#include "orliczkit/operators.hpp"

namespace orliczkit {

/// Reproducible family of random step functions.
struct Corpus {
  std::uint64_t seed = 1;
  int count = 100;
  int max_pieces = 8;
  double lo = 1e-3;
  double hi = 1e3;
  double max_value = 10.0;
  Domain domain = Domain::half_line;

  std::vector<StepFunction> members() const;
  nlohmann::json meta() const;
};

struct EquivalenceReport {
  std::string suite;
  std::vector<std::string> directions;
  bool passed = false;
  double worst_ratio = 0.0;
  double K = 0.0;  // +inf when no finite constant exists
  double C = 0.0;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json corpus = nlohmann::json::object();
  nlohmann::json failing_member = nullptr;
  nlohmann::json skipped = nlohmann::json::array();
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const EquivalenceReport& r);

/// gauge with weight eps * w of an operator output; the same
/// inf{lambda : (eps / lambda) int Phi(|g| / lambda) w <= 1} as for step functions.
GaugeResult gauge_of_output(const YoungFunction& phi, const OperatorOutput& g, const PowerWeight& w, double eps = 1.0);

/// Ratios modular(Phi1, T f_j on a window) / modular(Phi2, f_j) along a
/// deterministic family whose supports move toward 0 or infinity.
struct WitnessFamily {
  std::string family;  // e.g. "chi(2^-j,1)"
  std::vector<double> ratios;
  std::vector<double> windows;
  bool monotone = false;
};

WitnessFamily witness_family(const OperatorSpec& op, const YoungFunction& phi1, const YoungFunction& phi2,
                             double gamma, int steps = 10);

EquivalenceReport verify_gauge_modular_equiv(const YoungFunction& phi1, const YoungFunction& phi2,
                                             const OperatorSpec& op, double gamma, const Corpus& corpus);

EquivalenceReport verify_weak_strong(const YoungFunction& phi1, const YoungFunction& phi2, const FourWeights& W,
                                     const Corpus& corpus, const LogGrid& lambda_grid = {1e-3, 1e3, 25});

EquivalenceReport verify_condition_predicts(const OperatorSpec& op, const YoungFunction& phi1,
                                            const YoungFunction& phi2, double gamma, const Corpus& corpus);

struct CounterexampleReport {
  double gamma = 1.0;
  int kmax = 8;
  bool passed = false;
  nlohmann::json clauses = nlohmann::json::object();
};

nlohmann::json to_json(const CounterexampleReport& r);

CounterexampleReport counterexample_report(double gamma, int kmax);

}  // namespace orliczkit
