#include "tleak/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tleak/errors.hpp"
#include "tleak/propagate.hpp"

namespace tleak {

namespace {

constexpr int kDefaultStepsPerSpan = 2000;
constexpr double kGridSlack = 1e-9;
constexpr double kTimeSlack = 1e-12;

// Covariance matrices of |0_t> and |1_t> in their own mode basis.
struct GroundPair {
  CovarianceMatrix zero;
  CovarianceMatrix one;
};

GroundPair ground_pair(int n) {
  return {covariance_from_correlation(ground_state_qp_correlation(n, QubitState::zero)),
          covariance_from_correlation(ground_state_qp_correlation(n, QubitState::one))};
}

// The state is carried as W = U(t) V_in restricted to chain 1's first N columns (both chains
// evolve identically, and the remaining columns are tau_x kappa images).
class KernelStepper {
 public:
  KernelStepper(const ChainParams& params, const ModeBasis& basis_in, const CorrelationMatrix& upsilon0)
      : gen_(ChainGenerator::build(params)), n_(params.n_sites), upsilon0_(upsilon0) {
    w_ = basis_in.chains[0].vectors.leftCols(n_);
  }

  void step(double mu, double dt) { propagate_columns(w_, gen_, mu, dt); }

  CorrelationMatrix mode_correlation(const ModeBasis& basis, double t) const {
    const int d = 2 * n_;
    Eigen::MatrixXcd wfull(d, d);
    wfull.leftCols(n_) = w_;
    for (int k = 0; k < n_; ++k) wfull.col(n_ + k) = particle_hole_conjugate(Eigen::VectorXcd(w_.col(k)), n_);
    const Eigen::MatrixXcd g = basis.chains[0].vectors.adjoint() * wfull;
    const Eigen::MatrixXcd gc = g.conjugate();
    const Eigen::MatrixXcd gt = g.transpose();
    CorrelationMatrix u;
    u.n_sites = n_;
    u.basis = {BasisKind::mode, basis.mu, t};
    u.entries.resize(2 * d, 2 * d);
    for (int a = 0; a < 2; ++a) {
      for (int b = a; b < 2; ++b) {
        const Eigen::MatrixXcd blk = gc * upsilon0_.entries.block(a * d, b * d, d, d) * gt;
        u.entries.block(a * d, b * d, d, d) = blk;
        if (b != a) u.entries.block(b * d, a * d, d, d) = blk.adjoint();
      }
    }
    return u;
  }

 private:
  ChainGenerator gen_;
  int n_;
  CorrelationMatrix upsilon0_;
  Eigen::MatrixXcd w_;
};

class ReferenceStepper {
 public:
  ReferenceStepper(const ChainParams& params, const ModeBasis& basis_in, const CorrelationMatrix& upsilon0)
      : params_(params), gamma_(rotate_to_site_basis(upsilon0, basis_in)) {}

  void step(double mu, double dt) {
    propagate_correlation_reference(gamma_, build_tetron_bdg(params_, mu), dt);
  }

  CorrelationMatrix mode_correlation(const ModeBasis& basis, double t) const {
    return rotate_to_mode_basis(gamma_, basis, t);
  }

 private:
  ChainParams params_;
  CorrelationMatrix gamma_;
};

template <class Stepper>
std::vector<LeakageRecord> run_trajectory(const ChainParams& params, const RampProtocol& protocol,
                                          const SteppingPolicy& policy, const StepGrid& grid,
                                          const std::vector<double>& samples, QubitState initial) {
  const ModeBasis basis_in = tetron_mode_basis(params, protocol.mu_in);
  CorrelationMatrix upsilon0 = ground_state_qp_correlation(params.n_sites, initial);
  upsilon0.basis.mu = protocol.mu_in;
  Stepper stepper(params, basis_in, upsilon0);

  std::vector<LeakageRecord> out(samples.size());
  ModeBasis previous = basis_in;
  run_schedule(
      grid, protocol, samples, [&](double mu, double dt) { stepper.step(mu, dt); },
      [&](std::size_t i, double t) {
        const double mu = ramp_mu(protocol, t);
        ModeBasis basis = tetron_mode_basis(params, mu);
        align_mzm_signs(basis, previous);
        LeakageRecord rec = leakage_from_mode_correlation(stepper.mode_correlation(basis, t));
        rec.t = t;
        rec.mu = mu;
        if (rec.purity_defect > policy.purity_tol) {
          std::ostringstream os;
          os << "purity defect " << rec.purity_defect << " exceeds " << policy.purity_tol << " at t = " << t;
          throw StepSizeTooCoarse(os.str());
        }
        out[i] = rec;
        previous = std::move(basis);
      });
  return out;
}

}  // namespace

void SteppingPolicy::validate() const {
  if (!(max_dmu_per_step >= 0.0) || !std::isfinite(max_dmu_per_step)) {
    throw InvalidParameter("max_dmu_per_step must be >= 0 (0 selects the default)");
  }
  if (!(purity_tol > 0.0)) throw InvalidParameter("purity_tol must be > 0");
}

double SteppingPolicy::resolved_dmu(const RampProtocol& protocol) const {
  if (max_dmu_per_step > 0.0) return max_dmu_per_step;
  return std::abs(protocol.mu_fin - protocol.mu_in) / kDefaultStepsPerSpan;
}

double StepGrid::step_start(int s) const { return s * dt; }

double StepGrid::step_end(int s) const { return s + 1 >= steps ? duration : (s + 1) * dt; }

StepGrid make_step_grid(const RampProtocol& protocol, const SteppingPolicy& policy, int refine) {
  if (refine < 1) throw InvalidParameter("refine must be >= 1");
  StepGrid grid;
  grid.duration = protocol.duration();
  const double span = std::abs(protocol.mu_fin - protocol.mu_in);
  if (span == 0.0) return grid;
  const double dmu = policy.resolved_dmu(protocol);
  if (policy.final_time_snap) {
    // Refinement splits every base step so the Richardson pair shares its step boundaries.
    grid.steps = refine * std::max(1, static_cast<int>(std::ceil(span / dmu - kGridSlack)));
    grid.dt = grid.duration / grid.steps;
  } else {
    grid.dt = dmu / refine / protocol.rate;
    grid.steps = std::max(1, static_cast<int>(std::ceil(grid.duration / grid.dt - kGridSlack)));
  }
  return grid;
}

std::vector<double> default_sample_times(double duration, int interior) {
  std::vector<double> t(interior + 2);
  for (int i = 0; i <= interior + 1; ++i) t[i] = duration * i / (interior + 1);
  t.back() = duration;
  return t;
}

double ramp_mu(const RampProtocol& protocol, double t) {
  if (t >= protocol.duration()) return protocol.mu_fin;
  return protocol.mu_at(t);
}

void run_schedule(const StepGrid& grid, const RampProtocol& protocol,
                  const std::vector<double>& sample_times,
                  const std::function<void(double, double)>& step,
                  const std::function<void(std::size_t, double)>& sample) {
  const double eps = kTimeSlack * std::max(grid.duration, 1.0);
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double t = sample_times[i];
    if (!(t >= 0.0) || t > grid.duration + eps || (i > 0 && t < sample_times[i - 1])) {
      throw InvalidParameter("sample times must be sorted and lie in [0, T]");
    }
  }
  double tc = 0.0;
  int s = 0;
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double t = std::min(sample_times[i], grid.duration);
    while (s < grid.steps && t >= grid.step_end(s) - eps) {
      const double end = grid.step_end(s);
      if (end > tc) step(ramp_mu(protocol, grid.step_start(s)), end - tc);
      tc = end;
      ++s;
    }
    if (t - tc > eps) {
      step(ramp_mu(protocol, grid.step_start(s)), t - tc);
      tc = t;
    }
    sample(i, sample_times[i]);
  }
}

LeakageRecord leakage_from_mode_correlation(const CorrelationMatrix& u) {
  if (u.basis.kind != BasisKind::mode) throw InvalidParameter("leakage needs the mode basis");
  thread_local int cached_n = -1;
  thread_local GroundPair ground;
  if (cached_n != u.n_sites) {
    ground = ground_pair(u.n_sites);
    cached_n = u.n_sites;
  }
  const CovarianceMatrix m = covariance_from_correlation(u);
  ground.zero.basis = m.basis;
  ground.one.basis = m.basis;
  LeakageRecord rec;
  rec.parity = parity_expectation(m);
  rec.l_odd = 0.5 * (1.0 - rec.parity);
  rec.l_g = 1.0 - overlap_sq(m, ground.zero) - overlap_sq(m, ground.one);
  rec.l_even = rec.l_g - rec.l_odd;
  rec.purity_defect = purity_defect(m);
  return rec;
}

LeakageRecord richardson_combine(const LeakageRecord& coarse, const LeakageRecord& fine) {
  LeakageRecord rec = fine;
  // The left-endpoint scheme converges at second order in dt on the leakages.
  rec.l_odd = (4.0 * fine.l_odd - coarse.l_odd) / 3.0;
  rec.l_even = (4.0 * fine.l_even - coarse.l_even) / 3.0;
  rec.l_g = rec.l_odd + rec.l_even;
  rec.parity = 1.0 - 2.0 * rec.l_odd;
  rec.purity_defect = std::max(coarse.purity_defect, fine.purity_defect);
  return rec;
}

std::vector<LeakageRecord> evolve_ramp(const ChainParams& params, const RampProtocol& protocol,
                                       const SteppingPolicy& policy, std::vector<double> sample_times,
                                       QubitState initial) {
  params.validate();
  protocol.validate(params);
  policy.validate();
  if (sample_times.empty()) sample_times = default_sample_times(protocol.duration());

  auto run = [&](int refine) {
    const StepGrid grid = make_step_grid(protocol, policy, refine);
    if (policy.propagator == Propagator::reference) {
      return run_trajectory<ReferenceStepper>(params, protocol, policy, grid, sample_times, initial);
    }
    return run_trajectory<KernelStepper>(params, protocol, policy, grid, sample_times, initial);
  };
  std::vector<LeakageRecord> coarse = run(1);
  if (!policy.richardson) return coarse;
  const std::vector<LeakageRecord> fine = run(2);
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = richardson_combine(coarse[i], fine[i]);
  return coarse;
}

LeakageRecord sudden_quench(const ChainParams& params, double mu_in, double mu_fin, QubitState initial) {
  params.validate();
  for (double mu : {mu_in, mu_fin}) {
    if (!is_topological(mu, params.hopping, params.pairing)) {
      throw InvalidParameter("quench endpoint mu = " + std::to_string(mu) + " is not topological");
    }
  }
  const ModeBasis basis_in = tetron_mode_basis(params, mu_in);
  ModeBasis basis_fin = tetron_mode_basis(params, mu_fin);
  align_mzm_signs(basis_fin, basis_in);
  CorrelationMatrix upsilon0 = ground_state_qp_correlation(params.n_sites, initial);
  upsilon0.basis.mu = mu_in;
  const CorrelationMatrix gamma = rotate_to_site_basis(upsilon0, basis_in);
  LeakageRecord rec = leakage_from_mode_correlation(rotate_to_mode_basis(gamma, basis_fin));
  rec.t = 0.0;
  rec.mu = mu_fin;
  return rec;
}

}  // namespace tleak
