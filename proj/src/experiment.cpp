#include "tleak/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "tleak/analytics.hpp"
#include "tleak/errors.hpp"
#include "tleak/fock.hpp"

namespace tleak {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- config parsing helpers ----

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigInvalid(path, "must be an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
      throw ConfigInvalid(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double get_number(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigInvalid(join(path, key), "must be a number");
  return v.get<double>();
}

long long get_integer(const json& j, const std::string& path, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigInvalid(join(path, key), "must be an integer");
  return v.get<long long>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigInvalid(join(path, key), "must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigInvalid(join(path, key), "must be a string");
  return v.get<std::string>();
}

template <class T>
std::vector<T> get_list(const json& j, const std::string& path, const char* key) {
  const json& v = j.at(key);
  const std::string field = join(path, key);
  if (v.is_number()) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigInvalid(field, "must contain integers");
    }
    return {v.get<T>()};
  }
  if (!v.is_array()) throw ConfigInvalid(field, "must be a number or a list of numbers");
  std::vector<T> out;
  for (const auto& x : v) {
    if (!x.is_number() || (std::is_integral_v<T> && !x.is_number_integer())) {
      throw ConfigInvalid(field, std::is_integral_v<T> ? "must contain integers" : "must contain numbers");
    }
    out.push_back(x.get<T>());
  }
  return out;
}

std::string iso_time_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- sweep fan-out ----

struct RowResult {
  std::vector<double> values;
  json flags = json::object();
};

template <class Point, class F>
std::vector<RowResult> fan_out(const std::vector<Point>& points, bool parallel, F compute) {
  std::vector<RowResult> out(points.size());
  const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = compute(points[i]);
      if (!out[i].flags.contains("ok")) out[i].flags["ok"] = true;
    } catch (const std::exception& e) {
      out[i].values.clear();
      out[i].flags = {{"ok", false}, {"error", e.what()}};
    }
  }
  return out;
}

// Rows for failed points keep their key columns and carry NaN elsewhere.
void append_rows(ResultTable& table, const std::vector<RowResult>& rows,
                 const std::vector<std::vector<double>>& keys) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> values = rows[i].values;
    if (values.empty()) {
      values = keys[i];
      values.resize(table.columns.size(), kNaN);
    }
    table.add_row(std::move(values), rows[i].flags);
  }
}

const char* propagator_name(Propagator p) { return p == Propagator::kernel ? "kernel" : "reference"; }

double pick(const LeakageRecord& r, const std::string& column) {
  if (column == "L_odd") return r.l_odd;
  if (column == "L_even") return r.l_even;
  if (column == "L_g") return r.l_g;
  throw ConfigInvalid("fit.column", "power_approach needs L_odd, L_even or L_g");
}

// ---- individual experiment kinds ----

ResultTable run_ramp(const ExperimentConfig& c) {
  const RampProtocol protocol{c.mu_in, c.mu_fin.front(), c.rate};
  const auto records = evolve_ramp(c.model, protocol, c.stepping,
                                   default_sample_times(protocol.duration(), c.interior_samples));
  ResultTable t;
  t.columns = {{"t"}, {"mu"}, {"L_odd"}, {"L_even"}, {"L_g"}, {"parity"}, {"purity_defect"}};
  for (const auto& r : records) t.add_row({r.t, r.mu, r.l_odd, r.l_even, r.l_g, r.parity, r.purity_defect});
  return t;
}

ResultTable run_sweep_rate(const ExperimentConfig& c, const RunOptions& opt) {
  std::vector<std::pair<double, double>> points;  // (mu_fin, v)
  for (double mu : c.mu_fin) {
    for (double v : c.rates.resolve()) points.emplace_back(mu, v);
  }
  std::sort(points.begin(), points.end());
  const auto rows = fan_out(points, opt.parallel, [&](const std::pair<double, double>& p) {
    const RampProtocol protocol{c.mu_in, p.first, p.second};
    const auto r = evolve_ramp(c.model, protocol, c.stepping, {protocol.duration()}).back();
    return RowResult{{p.second, p.first, r.l_odd, r.l_even, r.l_g}};
  });
  ResultTable t;
  t.columns = {{"v"}, {"mu_fin"}, {"L_odd"}, {"L_even"}, {"L_g"}};
  std::vector<std::vector<double>> keys;
  for (const auto& p : points) keys.push_back({p.second, p.first});
  append_rows(t, rows, keys);
  return t;
}

ResultTable run_sweep_length(const ExperimentConfig& c, const RunOptions& opt) {
  std::vector<std::pair<double, int>> points;  // (mu_fin, N)
  for (double mu : c.mu_fin) {
    for (int n : c.lengths.resolve()) points.emplace_back(mu, n);
  }
  std::sort(points.begin(), points.end());
  const auto rows = fan_out(points, opt.parallel, [&](const std::pair<double, int>& p) {
    ChainParams model = c.model;
    model.n_sites = p.second;
    const RampProtocol protocol{c.mu_in, p.first, c.rate};
    const auto r = evolve_ramp(model, protocol, c.stepping, {protocol.duration()}).back();
    return RowResult{{double(p.second), p.first, c.rate, r.l_odd, r.l_even, r.l_g}};
  });
  ResultTable t;
  t.columns = {{"N", ColumnType::integer}, {"mu_fin"}, {"v"}, {"L_odd"}, {"L_even"}, {"L_g"}};
  std::vector<std::vector<double>> keys;
  for (const auto& p : points) keys.push_back({double(p.second), p.first, c.rate});
  append_rows(t, rows, keys);
  return t;
}

ResultTable run_sudden(const ExperimentConfig& c, const RunOptions& opt) {
  std::vector<std::pair<double, int>> points;
  for (double mu : c.mu_fin) {
    for (int n : c.lengths.resolve()) points.emplace_back(mu, n);
  }
  std::sort(points.begin(), points.end());
  const auto rows = fan_out(points, opt.parallel, [&](const std::pair<double, int>& p) {
    ChainParams model = c.model;
    model.n_sites = p.second;
    const LeakageRecord r = sudden_quench(model, c.mu_in, p.first);
    RowResult row;
    double odd_pred = kNaN;
    double even_pred = kNaN;
    try {
      const SuddenPrediction pred =
          sudden_prediction(tetron_mode_basis(model, c.mu_in), tetron_mode_basis(model, p.first), model.hopping);
      odd_pred = pred.l_odd_tilde;
      even_pred = pred.l_even_tilde;
    } catch (const Error& e) {
      row.flags["prediction_error"] = e.what();
    }
    row.values = {double(p.second), p.first, r.l_odd, r.l_even, r.l_g, odd_pred, even_pred};
    return row;
  });
  ResultTable t;
  t.columns = {{"N", ColumnType::integer}, {"mu_fin"},      {"L_odd"},       {"L_even"},
               {"L_g"},                    {"L_odd_pred"}, {"L_even_pred"}};
  std::vector<std::vector<double>> keys;
  for (const auto& p : points) keys.push_back({double(p.second), p.first});
  append_rows(t, rows, keys);
  return t;
}

ResultTable run_walk(const ExperimentConfig& c) {
  const WalkConfig wc{c.walk_length, c.walk_trials, c.seed};
  const WalkResult r = simulate_pair_walks(wc);
  ResultTable t;
  t.columns = {{"L", ColumnType::integer}, {"trials", ColumnType::integer}, {"seed", ColumnType::integer},
               {"p_exact"}, {"p_mc"}, {"std_error"}};
  t.add_row({double(wc.length), double(wc.trials), double(wc.seed), r.p_opposite_exact, r.p_opposite_mc,
             r.mc_std_error});
  t.metadata["rng"] = "mt19937_64 per block of 1024 trials, seeded seed + 0x9E3779B97F4A7C15 * (block + 1)";
  return t;
}

ResultTable run_fit(const ExperimentConfig& c) {
  const ResultTable input = ResultTable::read_csv(c.fit.input);
  const std::string& family = c.fit.family;
  const std::string xname = family == "linear_in_n" ? "N" : "v";
  if (input.column_index(xname) < 0) throw ConfigInvalid("fit.input", "table has no '" + xname + "' column");
  if (input.column_index(c.fit.column) < 0) {
    throw ConfigInvalid("fit.column", "table has no '" + c.fit.column + "' column");
  }
  const std::vector<double> x = input.column(xname);
  const std::vector<double> y = input.column(c.fit.column);
  const bool grouped = input.column_index("mu_fin") >= 0;
  const std::vector<double> group = grouped ? input.column("mu_fin") : std::vector<double>(x.size(), kNaN);
  std::set<double> keys;
  for (double g : group) keys.insert(g);
  if (!grouped) keys = {kNaN};

  // The sudden limit for power_approach comes from the model that produced the table,
  // taken from its sidecar when there is one.
  ExperimentConfig source = c;
  if (std::ifstream meta(metadata_path(c.fit.input)); meta) {
    try {
      const json m = json::parse(meta);
      if (m.contains("config")) {
        const ExperimentConfig prior = ExperimentConfig::from_json(m.at("config"));
        source.model = prior.model;
        source.mu_in = prior.mu_in;
      }
    } catch (const std::exception&) {
      // unreadable sidecar: fall back to the fit config's own model
    }
  }

  std::vector<std::string> names;
  if (family == "half_lz") names = {"k1", "k2", "m1", "m2", "omega"};
  else if (family == "power_approach") names = {"intercept", "k", "l_inf", "slope"};
  else names = {"intercept", "slope"};

  ResultTable t;
  t.columns.push_back({"mu_fin"});
  for (const auto& n : names) t.columns.push_back({n});
  for (const char* n : {"r_squared", "residual_norm", "domain_min", "domain_max"}) t.columns.push_back({n});
  t.columns.push_back({"points", ColumnType::integer});

  for (double key : keys) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (grouped && group[i] != key) continue;
      if (std::isnan(y[i])) continue;
      if (c.fit.window_min > 0.0 && x[i] < c.fit.window_min) continue;
      if (c.fit.window_max > 0.0 && x[i] > c.fit.window_max) continue;
      samples.emplace_back(x[i], y[i]);
    }
    try {
      FitResult fit;
      if (family == "half_lz") {
        fit = fit_half_lz(samples);
      } else if (family == "power_approach") {
        double l_inf = 0.0;
        if (c.fit.l_inf) {
          l_inf = *c.fit.l_inf;
        } else {
          if (!grouped) throw ConfigInvalid("fit.l_inf", "required when the table has no mu_fin column");
          l_inf = pick(sudden_quench(source.model, source.mu_in, key), c.fit.column);
        }
        fit = fit_power_approach(samples, l_inf);
      } else {
        fit = fit_linear_in_n(samples);
      }
      std::vector<double> row{key};
      for (const auto& n : names) row.push_back(fit.at(n));
      row.insert(row.end(), {fit.r_squared, fit.residual_norm, fit.domain_min, fit.domain_max,
                             double(fit.points_used)});
      t.add_row(std::move(row));
    } catch (const ConfigInvalid&) {
      throw;
    } catch (const std::exception& e) {
      std::vector<double> row(t.columns.size(), kNaN);
      row[0] = key;
      row.back() = double(samples.size());
      t.add_row(std::move(row), {{"ok", false}, {"error", e.what()}});
    }
  }
  t.metadata["fit"] = {{"family", family}, {"column", c.fit.column}, {"x", xname},
                       {"window", {c.fit.window_min, c.fit.window_max}}, {"input", c.fit.input},
                       {"model", {{"n_sites", source.model.n_sites}, {"hopping", source.model.hopping},
                                  {"pairing", source.model.pairing}, {"mu_in", source.mu_in}}}};
  return t;
}

ResultTable run_oracle_check(const ExperimentConfig& c, const RunOptions& opt) {
  struct Point {
    int n;
    double mu;
    double v;  // inf = sudden quench
    bool operator<(const Point& o) const { return std::tie(n, mu, v) < std::tie(o.n, o.mu, o.v); }
  };
  std::vector<Point> points;
  for (int n : c.lengths.resolve()) {
    for (double mu : c.mu_fin) {
      if (c.oracle_sudden) points.push_back({n, mu, kInf});
      for (double v : c.rates.resolve()) points.push_back({n, mu, v});
    }
  }
  std::sort(points.begin(), points.end());
  const auto rows = fan_out(points, opt.parallel, [&](const Point& p) {
    ChainParams model = c.model;
    model.n_sites = p.n;
    std::vector<LeakageRecord> cov;
    OracleTrajectory fock;
    if (std::isinf(p.v)) {
      cov = {sudden_quench(model, c.mu_in, p.mu)};
      fock = fock_oracle_quench(model, c.mu_in, p.mu);
    } else {
      const RampProtocol protocol{c.mu_in, p.mu, p.v};
      cov = evolve_ramp(model, protocol, c.stepping);
      fock = fock_oracle_ramp(model, protocol, c.stepping);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < cov.size(); ++i) {
      const LeakageRecord& a = cov[i];
      const LeakageRecord& b = fock.records[i];
      diff = std::max({diff, std::abs(a.l_odd - b.l_odd), std::abs(a.l_even - b.l_even), std::abs(a.l_g - b.l_g)});
    }
    const LeakageRecord& a = cov.back();
    const LeakageRecord& b = fock.records.back();
    RowResult row{{double(p.n), p.mu, p.v, a.l_odd, a.l_even, a.l_g, b.l_odd, b.l_even, b.l_g, diff}};
    row.flags["samples"] = cov.size();
    if (!(diff <= kOracleTolerance)) row.flags["mismatch"] = true;
    return row;
  });
  ResultTable t;
  t.columns = {{"N", ColumnType::integer}, {"mu_fin"},      {"v"},           {"L_odd_cov"}, {"L_even_cov"},
               {"L_g_cov"},                {"L_odd_fock"}, {"L_even_fock"}, {"L_g_fock"},  {"max_abs_diff"}};
  std::vector<std::vector<double>> keys;
  for (const auto& p : points) keys.push_back({double(p.n), p.mu, p.v});
  append_rows(t, rows, keys);
  double worst = 0.0;
  for (const auto& r : t.rows) worst = std::isnan(r.back()) ? kInf : std::max(worst, r.back());
  t.metadata["max_abs_diff"] = worst;
  t.metadata["tolerance"] = kOracleTolerance;
  return t;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ramp: return "ramp";
    case ExperimentKind::sweep_rate: return "sweep-rate";
    case ExperimentKind::sweep_length: return "sweep-length";
    case ExperimentKind::sudden: return "sudden";
    case ExperimentKind::walk: return "walk";
    case ExperimentKind::fit: return "fit";
    case ExperimentKind::oracle_check: return "oracle-check";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::ramp, ExperimentKind::sweep_rate, ExperimentKind::sweep_length,
                 ExperimentKind::sudden, ExperimentKind::walk, ExperimentKind::fit, ExperimentKind::oracle_check}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigInvalid("kind", "unknown experiment kind '" + s + "'");
}

std::vector<double> RateGrid::resolve() const {
  if (!values.empty()) {
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    return v;
  }
  if (count <= 0) return {};
  if (count == 1) return {min};
  std::vector<double> v(count);
  const double a = std::log(min);
  const double b = std::log(max);
  for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
  v.front() = min;
  v.back() = max;
  return v;
}

std::vector<int> LengthGrid::resolve() const {
  std::vector<int> raw = values;
  if (raw.empty() && step > 0) {
    for (int n = min; n <= max; n += step) raw.push_back(n);
  }
  std::vector<int> out;
  for (int n : raw) {
    if (parity == "even" && n % 2 != 0) continue;
    if (parity == "odd" && n % 2 == 0) continue;
    out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ExperimentConfig::validate() const {
  if (model.n_sites < 2) throw ConfigInvalid("model.n_sites", "must be >= 2");
  if (!std::isfinite(model.hopping) || !std::isfinite(model.pairing)) {
    throw ConfigInvalid("model", "hopping and pairing must be finite");
  }
  if (model.hopping == 0.0 && model.pairing == 0.0) {
    throw ConfigInvalid("model", "hopping and pairing cannot both be zero");
  }
  try {
    stepping.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigInvalid("stepping", e.what());
  }
  const bool needs_mu = kind != ExperimentKind::walk && kind != ExperimentKind::fit;
  if (needs_mu) {
    if (mu_fin.empty()) throw ConfigInvalid("protocol.mu_fin", "must not be empty");
    if (!is_topological(mu_in, model.hopping, model.pairing)) {
      throw ConfigInvalid("protocol.mu_in", "is outside the topological phase");
    }
    for (double mu : mu_fin) {
      if (!std::isfinite(mu) || !is_topological(mu, model.hopping, model.pairing)) {
        throw ConfigInvalid("protocol.mu_fin", "value " + std::to_string(mu) + " is outside the topological phase");
      }
    }
  }
  auto check_rates = [&](bool allow_empty) {
    const auto v = rates.resolve();
    if (!rates.values.empty() && rates.count > 0) throw ConfigInvalid("grids.rates", "give either values or min/max/count");
    if (rates.values.empty() && rates.count > 1 && !(rates.min > 0.0 && rates.max > rates.min)) {
      throw ConfigInvalid("grids.rates", "needs 0 < min < max");
    }
    if (v.empty() && !allow_empty) throw ConfigInvalid("grids.rates", "rate grid is empty");
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) throw ConfigInvalid("grids.rates", "rates must be positive and finite");
    }
  };
  auto check_lengths = [&](int max_n) {
    const auto n = lengths.resolve();
    if (lengths.values.empty() && lengths.step <= 0) throw ConfigInvalid("grids.lengths.step", "must be >= 1");
    if (lengths.parity != "any" && lengths.parity != "even" && lengths.parity != "odd") {
      throw ConfigInvalid("grids.lengths.parity", "must be any, even or odd");
    }
    if (n.empty()) throw ConfigInvalid("grids.lengths", "length grid is empty");
    for (int x : n) {
      if (x < 2) throw ConfigInvalid("grids.lengths", "lengths must be >= 2");
      if (x > max_n) {
        throw ConfigInvalid("grids.lengths", "length " + std::to_string(x) + " exceeds the limit " + std::to_string(max_n));
      }
    }
  };
  auto check_rate = [&] {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigInvalid("protocol.rate", "must be positive and finite");
  };
  switch (kind) {
    case ExperimentKind::ramp:
      check_rate();
      if (mu_fin.size() != 1) throw ConfigInvalid("protocol.mu_fin", "a single ramp takes exactly one value");
      if (interior_samples < 0) throw ConfigInvalid("sampling.interior", "must be >= 0");
      break;
    case ExperimentKind::sweep_rate: check_rates(false); break;
    case ExperimentKind::sweep_length:
      check_rate();
      check_lengths(std::numeric_limits<int>::max());
      break;
    case ExperimentKind::sudden: check_lengths(std::numeric_limits<int>::max()); break;
    case ExperimentKind::walk:
      if (walk_length < 1) throw ConfigInvalid("walk.length", "must be >= 1");
      if (walk_trials < 1) throw ConfigInvalid("walk.trials", "must be >= 1");
      break;
    case ExperimentKind::fit:
      if (fit.input.empty()) throw ConfigInvalid("fit.input", "must name a table");
      if (fit.family != "half_lz" && fit.family != "power_approach" && fit.family != "linear_in_n") {
        throw ConfigInvalid("fit.family", "must be half_lz, power_approach or linear_in_n");
      }
      if (fit.window_min < 0.0 || fit.window_max < 0.0 || (fit.window_max > 0.0 && fit.window_max < fit.window_min)) {
        throw ConfigInvalid("fit.window", "needs 0 <= min <= max");
      }
      break;
    case ExperimentKind::oracle_check:
      check_lengths(kMaxOracleSites);
      check_rates(true);
      if (!oracle_sudden && rates.resolve().empty()) throw ConfigInvalid("grids.rates", "oracle-check has no cases");
      break;
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["kind"] = to_string(kind);
  j["model"] = {{"n_sites", model.n_sites}, {"hopping", model.hopping}, {"pairing", model.pairing}};
  j["protocol"] = {{"mu_in", mu_in}, {"mu_fin", mu_fin}, {"rate", rate}};
  json r;
  if (!rates.values.empty()) r["values"] = rates.values;
  else r = {{"min", rates.min}, {"max", rates.max}, {"count", rates.count}};
  json l;
  if (!lengths.values.empty()) l["values"] = lengths.values;
  else l = {{"min", lengths.min}, {"max", lengths.max}, {"step", lengths.step}};
  l["parity"] = lengths.parity;
  j["grids"] = {{"rates", r}, {"lengths", l}};
  j["stepping"] = {{"max_dmu_per_step", stepping.max_dmu_per_step},
                   {"purity_tol", stepping.purity_tol},
                   {"richardson", stepping.richardson},
                   {"final_time_snap", stepping.final_time_snap},
                   {"propagator", propagator_name(stepping.propagator)}};
  j["sampling"] = {{"interior", interior_samples}};
  j["walk"] = {{"length", walk_length}, {"trials", walk_trials}};
  json f = {{"input", fit.input},
            {"family", fit.family},
            {"column", fit.column},
            {"window", {fit.window_min, fit.window_max}}};
  f["l_inf"] = fit.l_inf ? json(*fit.l_inf) : json(nullptr);
  j["fit"] = f;
  j["oracle"] = {{"sudden", oracle_sudden}};
  j["output"] = {{"path", output}, {"format", "csv"}};
  j["seed"] = seed;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  require_object(j, "config");
  check_keys(j, "", {"name", "kind", "model", "protocol", "grids", "stepping", "sampling", "walk", "fit", "oracle",
                     "output", "seed"});
  ExperimentConfig c;
  c.name = get_string(j, "", "name", "");
  if (!j.contains("kind")) throw ConfigInvalid("kind", "is required");
  c.kind = experiment_kind_from_string(get_string(j, "", "kind", ""));

  if (j.contains("model")) {
    const json& m = j.at("model");
    require_object(m, "model");
    check_keys(m, "model", {"n_sites", "hopping", "pairing"});
    const long long n = get_integer(m, "model", "n_sites", c.model.n_sites);
    if (n < 2 || n > 100000) throw ConfigInvalid("model.n_sites", "must lie in [2, 100000]");
    c.model.n_sites = static_cast<int>(n);
    c.model.hopping = get_number(m, "model", "hopping", c.model.hopping);
    c.model.pairing = get_number(m, "model", "pairing", c.model.pairing);
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    require_object(p, "protocol");
    check_keys(p, "protocol", {"mu_in", "mu_fin", "rate"});
    c.mu_in = get_number(p, "protocol", "mu_in", c.mu_in);
    if (p.contains("mu_fin")) c.mu_fin = get_list<double>(p, "protocol", "mu_fin");
    c.rate = get_number(p, "protocol", "rate", c.rate);
  }
  if (j.contains("grids")) {
    const json& g = j.at("grids");
    require_object(g, "grids");
    check_keys(g, "grids", {"rates", "lengths"});
    if (g.contains("rates")) {
      const json& r = g.at("rates");
      if (r.is_array()) {
        c.rates.values = get_list<double>(g, "grids", "rates");
      } else {
        require_object(r, "grids.rates");
        check_keys(r, "grids.rates", {"values", "min", "max", "count"});
        if (r.contains("values")) c.rates.values = get_list<double>(r, "grids.rates", "values");
        c.rates.min = get_number(r, "grids.rates", "min", 0.0);
        c.rates.max = get_number(r, "grids.rates", "max", 0.0);
        const long long count = get_integer(r, "grids.rates", "count", 0);
        if (count < 0 || count > 1000000) throw ConfigInvalid("grids.rates.count", "out of range");
        c.rates.count = static_cast<int>(count);
      }
    }
    if (g.contains("lengths")) {
      const json& l = g.at("lengths");
      if (l.is_array()) {
        c.lengths.values = get_list<int>(g, "grids", "lengths");
      } else {
        require_object(l, "grids.lengths");
        check_keys(l, "grids.lengths", {"values", "min", "max", "step", "parity"});
        if (l.contains("values")) c.lengths.values = get_list<int>(l, "grids.lengths", "values");
        c.lengths.min = static_cast<int>(get_integer(l, "grids.lengths", "min", 0));
        c.lengths.max = static_cast<int>(get_integer(l, "grids.lengths", "max", 0));
        c.lengths.step = static_cast<int>(get_integer(l, "grids.lengths", "step", 1));
        c.lengths.parity = get_string(l, "grids.lengths", "parity", "any");
      }
    }
  }
  if (j.contains("stepping")) {
    const json& s = j.at("stepping");
    require_object(s, "stepping");
    check_keys(s, "stepping", {"max_dmu_per_step", "purity_tol", "richardson", "final_time_snap", "propagator"});
    c.stepping.max_dmu_per_step = get_number(s, "stepping", "max_dmu_per_step", 0.0);
    c.stepping.purity_tol = get_number(s, "stepping", "purity_tol", c.stepping.purity_tol);
    c.stepping.richardson = get_bool(s, "stepping", "richardson", c.stepping.richardson);
    c.stepping.final_time_snap = get_bool(s, "stepping", "final_time_snap", c.stepping.final_time_snap);
    const std::string prop = get_string(s, "stepping", "propagator", "kernel");
    if (prop == "kernel") c.stepping.propagator = Propagator::kernel;
    else if (prop == "reference") c.stepping.propagator = Propagator::reference;
    else throw ConfigInvalid("stepping.propagator", "must be kernel or reference");
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    require_object(s, "sampling");
    check_keys(s, "sampling", {"interior"});
    const long long interior = get_integer(s, "sampling", "interior", c.interior_samples);
    if (interior < 0 || interior > 1000000) throw ConfigInvalid("sampling.interior", "out of range");
    c.interior_samples = static_cast<int>(interior);
  }
  if (j.contains("walk")) {
    const json& w = j.at("walk");
    require_object(w, "walk");
    check_keys(w, "walk", {"length", "trials"});
    c.walk_length = get_integer(w, "walk", "length", c.walk_length);
    c.walk_trials = get_integer(w, "walk", "trials", c.walk_trials);
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    require_object(f, "fit");
    check_keys(f, "fit", {"input", "family", "column", "window", "l_inf"});
    c.fit.input = get_string(f, "fit", "input", "");
    c.fit.family = get_string(f, "fit", "family", c.fit.family);
    c.fit.column = get_string(f, "fit", "column", c.fit.column);
    if (f.contains("window")) {
      const auto w = get_list<double>(f, "fit", "window");
      if (w.size() != 2) throw ConfigInvalid("fit.window", "must be [min, max]");
      c.fit.window_min = w[0];
      c.fit.window_max = w[1];
    }
    if (f.contains("l_inf") && !f.at("l_inf").is_null()) c.fit.l_inf = get_number(f, "fit", "l_inf", 0.0);
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    require_object(o, "oracle");
    check_keys(o, "oracle", {"sudden"});
    c.oracle_sudden = get_bool(o, "oracle", "sudden", c.oracle_sudden);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.is_string()) {
      c.output = o.get<std::string>();
    } else {
      require_object(o, "output");
      check_keys(o, "output", {"path", "format"});
      c.output = get_string(o, "output", "path", "");
      if (get_string(o, "output", "format", "csv") != "csv") throw ConfigInvalid("output.format", "only csv is supported");
    }
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer()) throw ConfigInvalid("seed", "must be an integer");
    c.seed = s.is_number_unsigned() ? s.get<std::uint64_t>() : static_cast<std::uint64_t>(s.get<long long>());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigInvalid("config", "cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("config", std::string("parse error: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

ResultTable run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string started_at = iso_time_now();
  ResultTable t;
  switch (config.kind) {
    case ExperimentKind::ramp: t = run_ramp(config); break;
    case ExperimentKind::sweep_rate: t = run_sweep_rate(config, options); break;
    case ExperimentKind::sweep_length: t = run_sweep_length(config, options); break;
    case ExperimentKind::sudden: t = run_sudden(config, options); break;
    case ExperimentKind::walk: t = run_walk(config); break;
    case ExperimentKind::fit: t = run_fit(config); break;
    case ExperimentKind::oracle_check: t = run_oracle_check(config, options); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.metadata["config"] = config.to_json();
  t.metadata["version"] = kVersion;
  t.metadata["kind"] = to_string(config.kind);
  t.metadata["started_at"] = started_at;
  t.metadata["wall_clock_seconds"] = seconds;
  t.metadata["threads"] = options.parallel ? omp_get_max_threads() : 1;
  t.metadata["all_rows_ok"] = t.all_rows_ok();
  return t;
}

}  // namespace tleak
