#pragma once

#include <functional>
#include <vector>

#include "tleak/gaussian.hpp"
#include "tleak/model.hpp"

namespace tleak {

enum class Propagator {
  kernel,     // Taylor series on the evolved mode columns (OpenMP)
  reference,  // eigendecomposition step on the full correlation matrix
};

struct SteppingPolicy {
  double max_dmu_per_step = 0.0;  // 0 selects |mu_fin - mu_in| / 2000
  double purity_tol = 1e-6;
  bool richardson = false;        // also run with half the step and extrapolate
  bool final_time_snap = true;    // shrink dt so the last step ends exactly at T
  Propagator propagator = Propagator::kernel;

  void validate() const;
  double resolved_dmu(const RampProtocol& protocol) const;
};

struct LeakageRecord {
  double t = 0.0;
  double mu = 0.0;
  double l_odd = 0.0;
  double l_even = 0.0;
  double l_g = 0.0;
  double parity = 1.0;
  double purity_defect = 0.0;
};

// Piecewise-constant time grid. mu is frozen at its value at the start of each step.
struct StepGrid {
  int steps = 0;
  double dt = 0.0;
  double duration = 0.0;

  double step_start(int s) const;
  double step_end(int s) const;
};

StepGrid make_step_grid(const RampProtocol& protocol, const SteppingPolicy& policy, int refine = 1);

// 0, T and `interior` evenly spaced points in between.
std::vector<double> default_sample_times(double duration, int interior = 200);

// Walks the grid, calling step(mu, dt) for every (possibly split) piece and sample(i, t)
// once the state has reached sample_times[i].
void run_schedule(const StepGrid& grid, const RampProtocol& protocol,
                  const std::vector<double>& sample_times,
                  const std::function<void(double mu, double dt)>& step,
                  const std::function<void(std::size_t i, double t)>& sample);

// mu(t) with mu(T) pinned to mu_fin.
double ramp_mu(const RampProtocol& protocol, double t);

// L_odd from the MZM parity, L_g from the overlaps with |0_t>, |1_t>, L_even = L_g - L_odd.
LeakageRecord leakage_from_mode_correlation(const CorrelationMatrix& u);

// Richardson combination (4 fine - coarse) / 3 of L_odd and L_even; L_g reassembled.
LeakageRecord richardson_combine(const LeakageRecord& coarse, const LeakageRecord& fine);

std::vector<LeakageRecord> evolve_ramp(const ChainParams& params, const RampProtocol& protocol,
                                       const SteppingPolicy& policy,
                                       std::vector<double> sample_times = {},
                                       QubitState initial = QubitState::plus);

LeakageRecord sudden_quench(const ChainParams& params, double mu_in, double mu_fin,
                            QubitState initial = QubitState::plus);

}  // namespace tleak
