#pragma once

// Dense many-body Kitaev chain built from Jordan-Wigner strings. Shares no code with the
// library and serves as an independent check of the single-particle machinery.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

class Chain {
 public:
  explicit Chain(int n) : n_(n), dim_(1 << n) {
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim_, dim_);
      for (int s = 0; s < dim_; ++s) {
        if (!(s >> j & 1)) continue;
        const int below = std::popcount(static_cast<unsigned>(s & ((1 << j) - 1)));
        c(s ^ (1 << j), s) = below % 2 ? -1.0 : 1.0;
      }
      c_.push_back(c);
    }
  }

  int dim() const { return dim_; }

  Eigen::MatrixXd hamiltonian(double mu, double w, double delta) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int j = 0; j < n_; ++j) h -= mu * c_[j].transpose() * c_[j];
    for (int j = 0; j + 1 < n_; ++j) {
      const Eigen::MatrixXd hop = c_[j].transpose() * c_[j + 1];
      const Eigen::MatrixXd pair = c_[j] * c_[j + 1];
      h += -w * (hop + hop.transpose()) + delta * (pair + pair.transpose());
    }
    return h;
  }

  // Basis states with an even (parity = +1) or odd number of fermions.
  std::vector<int> sector(int parity) const {
    std::vector<int> idx;
    for (int s = 0; s < dim_; ++s) {
      if ((std::popcount(static_cast<unsigned>(s)) % 2 == 0) == (parity > 0)) idx.push_back(s);
    }
    return idx;
  }

 private:
  int n_;
  int dim_;
  std::vector<Eigen::MatrixXd> c_;
};

inline Eigen::MatrixXd restrict(const Eigen::MatrixXd& h, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out(a, b) = h(idx[a], idx[b]);
  }
  return out;
}

// Many-body spectrum minus the ground energy, ascending.
inline std::vector<double> excitation_spectrum(int n, double mu, double w, double delta) {
  Chain chain(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain.hamiltonian(mu, w, delta));
  std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + chain.dim());
  const double e0 = e.front();
  for (double& x : e) x -= e0;
  return e;
}

struct Leakage {
  double l_odd = 0.0;
  double l_even = 0.0;
  double l_g = 0.0;
};

// Tetron leakage for |+> built from two identical chains. Each chain is evolved in both
// parity sectors; the two tetron components live in different per-chain sectors and do
// not interfere. Valid for w = Delta = 1/2 and |mu| <= 0.2, where every bulk quasiparticle
// costs between 0.8 and 1.2 and the number of them is the rounded excitation energy.
// `steps` = 0 is a sudden quench; otherwise mu is held at its value at the start of each
// of `steps` equal steps of a ramp at rate v.
inline Leakage tetron_leakage(int n, double mu_in, double mu_fin, double v, int steps) {
  using cd = std::complex<double>;
  const double w = 0.5, delta = 0.5;
  Chain chain(n);
  const Eigen::MatrixXd h_fin = chain.hamiltonian(mu_fin, w, delta);
  const double e_ground = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h_fin).eigenvalues()(0);
  Leakage out;
  for (int parity : {1, -1}) {
    const auto idx = chain.sector(parity);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> start(restrict(chain.hamiltonian(mu_in, w, delta), idx));
    Eigen::VectorXcd psi = start.eigenvectors().col(0).cast<cd>();
    if (steps > 0) {
      const double duration = std::abs(mu_fin - mu_in) / v;
      const double dt = duration / steps;
      const double sign = mu_fin >= mu_in ? 1.0 : -1.0;
      for (int s = 0; s < steps; ++s) {
        const double mu = mu_in + sign * v * dt * s;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restrict(chain.hamiltonian(mu, w, delta), idx));
        const Eigen::MatrixXcd u = es.eigenvectors().cast<cd>();
        Eigen::VectorXcd phase(idx.size());
        for (int k = 0; k < phase.size(); ++k) phase(k) = std::exp(cd(0.0, -es.eigenvalues()(k) * dt));
        psi = u * phase.asDiagonal() * (u.adjoint() * psi);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fin(restrict(h_fin, idx));
    std::vector<double> q(n + 1, 0.0);  // probability of k bulk quasiparticles
    for (int k = 0; k < fin.eigenvalues().size(); ++k) {
      const int count = static_cast<int>(std::lround(fin.eigenvalues()(k) - e_ground));
      q[std::min(count, n)] += std::norm(fin.eigenvectors().col(k).cast<cd>().dot(psi));
    }
    double odd = 0.0;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        if ((a + b) % 2) odd += q[a] * q[b];
      }
    }
    out.l_odd += 0.5 * odd;
    out.l_g += 0.5 * (1.0 - q[0] * q[0]);
  }
  out.l_even = out.l_g - out.l_odd;
  return out;
}

}  // namespace oracle
