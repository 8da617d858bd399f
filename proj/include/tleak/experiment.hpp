#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tleak/dynamics.hpp"
#include "tleak/model.hpp"
#include "tleak/qpwalk.hpp"
#include "tleak/table.hpp"

namespace tleak {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { ramp, sweep_rate, sweep_length, sudden, walk, fit, oracle_check };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Either explicit values or `count` log-spaced points in [min, max].
struct RateGrid {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  std::vector<double> resolve() const;
};

// Either explicit values or min..max in steps of `step`, optionally restricted to even/odd N.
struct LengthGrid {
  std::vector<int> values;
  int min = 0;
  int max = 0;
  int step = 1;
  std::string parity = "any";  // any | even | odd

  std::vector<int> resolve() const;
};

struct FitSpec {
  std::string input;               // CSV from an earlier run
  std::string family = "half_lz";  // half_lz | power_approach | linear_in_n
  std::string column = "L_odd";
  double window_min = 0.0;         // 0 = unbounded
  double window_max = 0.0;
  std::optional<double> l_inf;     // power_approach: defaults to the sudden-quench value
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::ramp;
  ChainParams model;
  double mu_in = 0.0;
  std::vector<double> mu_fin{0.03};
  double rate = 1e-3;
  RateGrid rates;
  LengthGrid lengths;
  SteppingPolicy stepping;
  int interior_samples = 200;  // ramp kind only
  long long walk_length = 100;
  long long walk_trials = 100000;
  FitSpec fit;
  bool oracle_sudden = true;   // oracle-check: include the quench case
  std::string output;
  std::uint64_t seed = 0;

  // Throws ConfigInvalid naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  bool parallel = true;  // fan sweep points out over OpenMP threads
  bool quiet = true;
};

// Runs the experiment and returns its table; metadata carries the resolved config.
// Numerical failures of individual sweep points are recorded in the row flags.
ResultTable run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Threshold above which oracle-check reports a mismatch.
inline constexpr double kOracleTolerance = 1e-6;

}  // namespace tleak
