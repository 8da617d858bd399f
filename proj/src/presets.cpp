#include "tleak/presets.hpp"

#include "tleak/errors.hpp"

namespace tleak {

namespace {

ExperimentConfig base(const std::string& name, ExperimentKind kind) {
  ExperimentConfig c;
  c.name = name;
  c.kind = kind;
  c.model = {40, 0.5, 0.5};
  c.mu_in = 0.0;
  c.stepping.richardson = true;
  return c;
}

std::vector<Preset> build() {
  std::vector<Preset> out;

  auto c = base("fig2-main", ExperimentKind::sweep_rate);
  c.mu_fin = {0.03, 0.1};
  c.rates.min = 1e-4;
  c.rates.max = 1e1;
  c.rates.count = 51;
  out.push_back({c.name, "final leakage vs ramp rate, N=40, mu_fin in {0.03, 0.1}", c});

  c = base("fig2-inset", ExperimentKind::sweep_length);
  c.mu_fin = {0.03};
  c.rate = 2e-2;
  c.lengths = {{}, 2, 100, 1, "even"};
  out.push_back({c.name, "final leakage vs even N in [2, 100] at v=2e-2, mu_fin=0.03", c});

  c = base("fig3", ExperimentKind::sudden);
  c.mu_fin = {0.01, 0.03, 0.1, 0.5};
  c.lengths = {{}, 2, 100, 1, "any"};
  out.push_back({c.name, "sudden-quench leakage vs N in [2, 100] with the analytic estimates", c});

  c = base("fig4", ExperimentKind::sweep_rate);
  c.mu_fin = {0.01, 0.03, 0.1};
  c.rates.min = 1e-2;
  c.rates.max = 1e2;
  c.rates.count = 41;
  out.push_back({c.name, "approach to the sudden limit at high ramp rate, N=40", c});

  c = base("fig5", ExperimentKind::sweep_rate);
  c.mu_fin = {0.01, 0.03};
  c.rates.min = 1e-4;
  c.rates.max = 1e-3;
  c.rates.count = 241;
  out.push_back({c.name, "near-adiabatic oscillations for v in [1e-4, 1e-3], N=40", c});

  c = base("fig6", ExperimentKind::sweep_length);
  c.mu_fin = {0.01, 0.03, 0.1};
  c.rate = 1e-3;
  c.lengths = {{}, 2, 100, 1, "any"};
  out.push_back({c.name, "final leakage vs N in [2, 100] at v=1e-3", c});

  for (auto& p : out) p.config.output = p.name + ".csv";
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigInvalid("preset", "unknown preset '" + name + "'");
}

}  // namespace tleak
