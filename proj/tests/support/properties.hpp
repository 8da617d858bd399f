#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "tleak/analytics.hpp"
#include "tleak/dynamics.hpp"
#include "tleak/gaussian.hpp"
#include "tleak/model.hpp"

namespace props {

struct Outcome {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation seen
  double tolerance = 0.0;
  int rejected = 0;    // draws outside the generator's domain, redrawn

  bool ok() const { return cases > 0 && failures == 0; }
  void record(double violation) {
    ++cases;
    worst = std::max(worst, violation);
    if (!(violation <= tolerance)) ++failures;
  }
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  tleak::ChainParams params(int n_min, int n_max) {
    return {integer(n_min, n_max), uniform(0.2, 1.0), 0.0};
  }

  // w in [0.2, 1], Delta/w in [0.3, 1.5], mu_a in w * [-0.4, 0.4] and mu_b = mu_a + w * [-spread, spread],
  // redrawn until the zero pair stays well below the bulk (eps_0 < eps_1 / 10) along [mu_a, mu_b].
  tleak::ChainParams topological(int n_min, int n_max, double spread, double& mu_a, double& mu_b, int& rejected) {
    for (;;) {
      tleak::ChainParams p = params(n_min, n_max);
      p.pairing = p.hopping * uniform(0.3, 1.5);
      mu_a = p.hopping * uniform(-0.4, 0.4);
      mu_b = mu_a + p.hopping * uniform(-spread, spread);
      bool ok = true;
      for (int k = 0; k <= 4 && ok; ++k) ok = isolated_zero_pair(p, mu_a + (mu_b - mu_a) * k / 4.0);
      if (ok) return p;
      ++rejected;
    }
  }
  tleak::ChainParams topological(int n_min, int n_max, double& mu, int& rejected) {
    double unused = 0.0;
    return topological(n_min, n_max, 0.0, mu, unused, rejected);
  }

  static bool isolated_zero_pair(const tleak::ChainParams& p, double mu) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(tleak::build_chain_bdg(p, mu).entries, Eigen::EigenvaluesOnly);
    const auto& e = es.eigenvalues();
    const int n = p.n_sites;
    return std::abs(e(n)) < 0.1 * e(n + 1);
  }

 private:
  std::mt19937_64 rng_;
};

inline Outcome particle_hole(int cases, std::uint64_t seed) {
  Outcome o{"PH symmetry and spectral symmetry", 0, 0, 0.0, 1e-10};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    tleak::ChainParams p = g.params(2, 30);
    p.pairing = g.uniform(-1.0, 1.0);
    const double mu = g.uniform(-2.5, 2.5);
    const tleak::BdGMatrix h = i % 2 ? tleak::build_tetron_bdg(p, mu) : tleak::build_chain_bdg(p, mu);
    double v = (tleak::particle_hole_conjugate(h.entries, p.n_sites) + h.entries).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.entries, Eigen::EigenvaluesOnly);
    const auto& e = es.eigenvalues();
    for (int k = 0; k < e.size(); ++k) v = std::max(v, std::abs(e(k) + e(e.size() - 1 - k)));
    o.record(v);
  }
  return o;
}

inline Outcome mode_basis(int cases, std::uint64_t seed) {
  Outcome o{"mode completeness, unitarity, Majorana condition", 0, 0, 0.0, 1e-10};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    double mu = 0.0;
    const tleak::ChainParams p = g.topological(8, 30, mu, o.rejected);
    const tleak::ModeBasis b = tleak::tetron_mode_basis(p, mu);
    const Eigen::MatrixXcd v = b.full_vectors();
    double worst = (v.adjoint() * v - Eigen::MatrixXcd::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff();
    worst = std::max(worst, (tleak::reconstruct_bdg(b) - tleak::build_tetron_bdg(p, mu).entries).cwiseAbs().maxCoeff());
    for (const auto& c : b.chains) {
      for (const auto* gamma : {&c.gamma_left, &c.gamma_right}) {
        worst = std::max(worst, (tleak::particle_hole_conjugate(*gamma, p.n_sites) - *gamma).cwiseAbs().maxCoeff());
      }
    }
    o.record(worst);
  }
  return o;
}

inline Outcome pfaffian(int cases, std::uint64_t seed) {
  Outcome o{"Pf(A)^2 = det(A)", 0, 0, 0.0, 1e-10};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    const double scale = std::pow(10.0, g.uniform(-1.0, 1.0));
    for (int r = 0; r < 4; ++r) {
      for (int c = r + 1; c < 4; ++c) {
        a(r, c) = scale * g.uniform(-1.0, 1.0);
        a(c, r) = -a(r, c);
      }
    }
    const double pf = tleak::pfaffian4(a);
    const double det = a.determinant();
    o.record(std::abs(pf * pf - det) / std::max(1.0, std::abs(det)));
  }
  return o;
}

inline Outcome overlap(int cases, std::uint64_t seed) {
  Outcome o{"overlap normalization, symmetry, bounds", 0, 0, 0.0, 1e-8};
  Gen g(seed);
  const tleak::QubitState labels[] = {tleak::QubitState::zero, tleak::QubitState::one, tleak::QubitState::plus};
  for (int i = 0; i < cases; ++i) {
    double mu_a = 0.0, mu_b = 0.0;
    const tleak::ChainParams p = g.topological(2, 14, 0.2, mu_a, mu_b, o.rejected);
    auto state = [&](double mu, tleak::QubitState s) {
      return tleak::covariance_from_correlation(
          tleak::rotate_to_site_basis(tleak::ground_state_qp_correlation(p.n_sites, s), tleak::tetron_mode_basis(p, mu)));
    };
    const auto a = state(mu_a, labels[g.integer(0, 2)]);
    const auto b = state(mu_b, labels[g.integer(0, 2)]);
    const double ab = tleak::overlap_sq(a, b);
    const double ba = tleak::overlap_sq(b, a);
    double v = std::abs(tleak::overlap_sq(a, a) - 1.0);
    v = std::max({v, std::abs(ab - ba), std::max(0.0, -ab), std::max(0.0, ab - 1.0)});
    o.record(v);
  }
  return o;
}

inline Outcome leakage_sum_sudden(int cases, std::uint64_t seed) {
  Outcome o{"L_g = L_odd + L_even and bounds (sudden quenches)", 0, 0, 0.0, 1e-10};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    double mu_in = 0.0, mu_fin = 0.0;
    const tleak::ChainParams p = g.topological(2, 24, 0.3, mu_in, mu_fin, o.rejected);
    const tleak::LeakageRecord r = tleak::sudden_quench(p, mu_in, mu_fin);
    double v = std::abs(r.l_g - r.l_odd - r.l_even);
    for (double x : {r.l_odd, r.l_even, r.l_g}) v = std::max({v, std::max(0.0, -1e-9 - x), std::max(0.0, x - 1.0 - 1e-9)});
    o.record(v);
  }
  return o;
}

// Purity drift over short random ramps; also checks L_g = L_odd + L_even on every sample.
inline Outcome purity_ramps(int cases, std::uint64_t seed) {
  Outcome o{"purity drift <= 1e-6 and L_g = L_odd + L_even (ramps)", 0, 0, 0.0, 1e-6};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    double mu_in = 0.0, mu_fin = 0.0;
    const tleak::ChainParams p = g.topological(2, 10, 0.3, mu_in, mu_fin, o.rejected);
    if (mu_fin == mu_in) continue;
    const tleak::RampProtocol r{mu_in, mu_fin, std::pow(10.0, g.uniform(-2.5, 0.5))};
    tleak::SteppingPolicy policy;
    policy.max_dmu_per_step = std::abs(mu_fin - mu_in) / g.integer(20, 200);
    policy.purity_tol = 1.0;  // measured here rather than enforced
    double v = 0.0;
    for (const auto& rec : tleak::evolve_ramp(p, r, policy, tleak::default_sample_times(r.duration(), 10))) {
      v = std::max(v, rec.purity_defect);
      if (std::abs(rec.l_g - rec.l_odd - rec.l_even) > 1e-10) v = 1.0;
    }
    o.record(v);
  }
  return o;
}

inline Outcome odd_length_independence(int cases, std::uint64_t seed) {
  Outcome o{"sudden L_odd prediction: N=20 vs N=100", 0, 0, 0.0, 1e-6};
  Gen g(seed);
  for (int i = 0; i < cases; ++i) {
    const double mu = g.uniform(1e-3, 0.1);
    auto pred = [&](int n) {
      const tleak::ChainParams p{n, 0.5, 0.5};
      return tleak::sudden_odd_prediction(tleak::tetron_mode_basis(p, 0.0), tleak::tetron_mode_basis(p, mu));
    };
    o.record(std::abs(pred(20) - pred(100)));
  }
  return o;
}

}  // namespace props
