#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tleak/errors.hpp"
#include "tleak/experiment.hpp"
#include "tleak/presets.hpp"

namespace fs = std::filesystem;
using namespace tleak;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kOracleMismatch = 4 };

struct Common {
  std::string config_path;
  std::string preset;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool serial = false;
};

void add_common(CLI::App* cmd, Common& o, bool with_preset) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  if (with_preset) cmd->add_option("--preset", o.preset, "built-in preset name");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--threads", o.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "RNG seed override");
  cmd->add_flag("--quiet", o.quiet, "no summary on stdout");
  cmd->add_flag("--serial", o.serial, "run sweep points one after another");
}

std::string output_path(const ExperimentConfig& c, const std::string& flag) {
  std::string p = !flag.empty() ? flag : !c.output.empty() ? c.output : (c.name.empty() ? to_string(c.kind) : c.name) + std::string(".csv");
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("TLEAK_OUTPUT_DIR"); dir && *dir) path = fs::path(dir) / path;
  }
  return path.string();
}

ExperimentConfig resolve_config(const Common& o) {
  if (!o.config_path.empty() && !o.preset.empty()) throw ConfigInvalid("--config", "give either --config or --preset");
  ExperimentConfig c;
  if (!o.preset.empty()) c = find_preset(o.preset).config;
  else if (!o.config_path.empty()) c = load_config(o.config_path);
  else throw ConfigInvalid("--config", "a config file or preset is required");
  if (o.seed) c.seed = *o.seed;
  return c;
}

int execute(ExperimentConfig config, const Common& o) {
  try {
    config.validate();
  } catch (const ConfigInvalid& e) {
    std::fprintf(stderr, "tleak: invalid config: %s\n", e.what());
    return kValidation;
  }
  if (o.threads > 0) omp_set_num_threads(o.threads);
  const std::string path = output_path(config, o.out);
  config.output = path;

  ResultTable table;
  try {
    table = run_experiment(config, {!o.serial, o.quiet});
  } catch (const ConfigInvalid& e) {
    std::fprintf(stderr, "tleak: invalid config: %s\n", e.what());
    return kValidation;
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "tleak: invalid parameter: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tleak: numerical failure: %s\n", e.what());
    return kNumerical;
  }
  try {
    if (path.find('/') != std::string::npos) fs::create_directories(fs::path(path).parent_path());
    table.write_csv(path);
    table.write_metadata(path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tleak: %s\n", e.what());
    return kNumerical;
  }

  std::size_t failed = 0;
  for (const auto& f : table.row_flags) failed += f.value("ok", true) ? 0 : 1;
  if (!o.quiet) {
    std::printf("%s: %zu rows -> %s (%.2f s)\n", to_string(config.kind), table.rows.size(), path.c_str(),
                table.metadata.value("wall_clock_seconds", 0.0));
    if (config.kind == ExperimentKind::oracle_check) {
      std::printf("max |cov - fock| = %.3e (tolerance %.0e)\n", table.metadata.value("max_abs_diff", 0.0),
                  kOracleTolerance);
    }
  }
  if (failed) {
    std::fprintf(stderr, "tleak: %zu of %zu rows failed, see %s\n", failed, table.rows.size(),
                 metadata_path(path).c_str());
    return kNumerical;
  }
  if (config.kind == ExperimentKind::oracle_check && !(table.metadata.value("max_abs_diff", 0.0) <= kOracleTolerance)) {
    std::fprintf(stderr, "tleak: oracle mismatch above %.0e\n", kOracleTolerance);
    return kOracleMismatch;
  }
  return kOk;
}

ExperimentConfig default_oracle_config() {
  ExperimentConfig c;
  c.name = "oracle-check";
  c.kind = ExperimentKind::oracle_check;
  c.model = {2, 0.5, 0.5};
  c.mu_fin = {0.03, 0.1};
  c.lengths.values = {2, 3};
  c.rates.values = {1e-2, 1e-1};
  c.oracle_sudden = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage of Kitaev-tetron qubits under chemical potential ramps"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "run an experiment from a config or preset");
  add_common(run, run_opts, true);

  Common fit_opts;
  std::string fit_input, fit_family, fit_column;
  std::vector<double> fit_window;
  std::optional<double> fit_l_inf;
  auto* fit = app.add_subcommand("fit", "fit a model family to an earlier result table");
  add_common(fit, fit_opts, false);
  fit->add_option("--input", fit_input, "result table to fit")->check(CLI::ExistingFile);
  fit->add_option("--family", fit_family, "half_lz | power_approach | linear_in_n");
  fit->add_option("--column", fit_column, "column to fit (default L_odd)");
  fit->add_option("--window", fit_window, "x window: MIN MAX")->expected(2);
  fit->add_option("--l-inf", fit_l_inf, "limit value for power_approach");

  Common oracle_opts;
  auto* oracle = app.add_subcommand("oracle-check", "compare the covariance evolution with the Fock-space oracle");
  add_common(oracle, oracle_opts, false);

  std::string show;
  auto* list = app.add_subcommand("presets", "list built-in presets");
  list->add_option("--show", show, "print the config of one preset as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return execute(resolve_config(run_opts), run_opts);

    if (*fit) {
      ExperimentConfig c;
      if (!fit_opts.config_path.empty()) {
        c = load_config(fit_opts.config_path);
      } else {
        c.name = "fit";
      }
      c.kind = ExperimentKind::fit;
      if (!fit_input.empty()) c.fit.input = fit_input;
      if (!fit_family.empty()) c.fit.family = fit_family;
      if (!fit_column.empty()) c.fit.column = fit_column;
      if (fit_window.size() == 2) {
        c.fit.window_min = fit_window[0];
        c.fit.window_max = fit_window[1];
      }
      if (fit_l_inf) c.fit.l_inf = fit_l_inf;
      if (fit_opts.seed) c.seed = *fit_opts.seed;
      return execute(c, fit_opts);
    }

    if (*oracle) {
      ExperimentConfig c = oracle_opts.config_path.empty() ? default_oracle_config() : load_config(oracle_opts.config_path);
      if (c.kind != ExperimentKind::oracle_check) throw ConfigInvalid("kind", "oracle-check needs kind oracle-check");
      if (oracle_opts.seed) c.seed = *oracle_opts.seed;
      return execute(c, oracle_opts);
    }

    if (*list) {
      if (!show.empty()) {
        std::cout << find_preset(show).config.to_json().dump(2) << '\n';
        return kOk;
      }
      for (const auto& p : presets()) std::printf("%-12s %s\n", p.name.c_str(), p.description.c_str());
      return kOk;
    }
  } catch (const ConfigInvalid& e) {
    std::fprintf(stderr, "tleak: invalid config: %s\n", e.what());
    return kValidation;
  }
  return kOk;
}
