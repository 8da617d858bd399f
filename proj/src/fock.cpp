#include "tleak/fock.hpp"

#include <bit>
#include <cmath>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

void check_oracle_size(const ChainParams& params) {
  params.validate();
  if (params.n_sites > kMaxOracleSites) {
    throw InvalidParameter("Fock oracle supports n_sites <= " + std::to_string(kMaxOracleSites));
  }
}

struct Measurement {
  LeakageRecord record;
  double total_parity = 0.0;
  double norm = 0.0;
};

Measurement measure(const FockSpace& fock, const ModeBasis& basis, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd vac = fock.qp_vacuum(basis);
  const Eigen::VectorXcd pair = fock.qp_pair_state(basis, vac);
  Measurement m;
  m.norm = psi.norm();
  m.record.parity = psi.dot(fock.mzm_parity(basis) * psi).real();
  m.record.l_odd = 0.5 * (1.0 - m.record.parity);
  m.record.l_g = 1.0 - std::norm(vac.dot(psi)) - std::norm(pair.dot(psi));
  m.record.l_even = m.record.l_g - m.record.l_odd;
  m.total_parity = psi.dot(fock.total_parity_diagonal().cast<cplx>().asDiagonal() * psi).real();
  return m;
}

Eigen::VectorXcd plus_state(const FockSpace& fock, const ModeBasis& basis) {
  const Eigen::VectorXcd vac = fock.qp_vacuum(basis);
  return (vac + fock.qp_pair_state(basis, vac)) / std::sqrt(2.0);
}

}  // namespace

FockSpace::FockSpace(int n_sites) : n_(n_sites), dim_(1 << (2 * n_sites)) {
  if (n_sites < 1 || n_sites > kMaxOracleSites) throw InvalidParameter("FockSpace: unsupported n_sites");
  for (int m = 0; m < modes(); ++m) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim_, dim_);
    const unsigned bit = 1u << m;
    for (unsigned s = 0; s < static_cast<unsigned>(dim_); ++s) {
      if (!(s & bit)) continue;
      const int sign = (std::popcount(s & (bit - 1)) % 2) ? -1 : 1;
      c(s ^ bit, s) = sign;
    }
    c_.push_back(std::move(c));
  }
}

Eigen::MatrixXd FockSpace::doubled_operator(int chain, int a) const {
  const int m = chain * n_ + (a % n_);
  return a < n_ ? c_[m] : Eigen::MatrixXd(c_[m].transpose());
}

Eigen::MatrixXd FockSpace::hamiltonian(const ChainParams& params, double mu) const {
  if (params.n_sites != n_) throw InvalidParameter("FockSpace: n_sites mismatch");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int chain = 0; chain < 2; ++chain) {
    for (int j = 0; j < n_; ++j) {
      const auto& cj = c_[chain * n_ + j];
      h -= mu * cj.transpose() * cj;
      if (j + 1 == n_) continue;
      const auto& ck = c_[chain * n_ + j + 1];
      const Eigen::MatrixXd hop = cj.transpose() * ck;
      const Eigen::MatrixXd pair = cj * ck;
      h -= params.hopping * (hop + hop.transpose());
      h += params.pairing * (pair + pair.transpose());
    }
  }
  return h;
}

Eigen::VectorXd FockSpace::total_parity_diagonal() const {
  Eigen::VectorXd p(dim_);
  for (unsigned s = 0; s < static_cast<unsigned>(dim_); ++s) p[s] = (std::popcount(s) % 2) ? -1.0 : 1.0;
  return p;
}

Eigen::MatrixXcd FockSpace::linear_operator(const Eigen::VectorXcd& v) const {
  if (v.size() != 4 * n_) throw InvalidParameter("linear_operator: vector length must be 4N");
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int chain = 0; chain < 2; ++chain) {
    for (int a = 0; a < 2 * n_; ++a) {
      const cplx coef = std::conj(v[2 * n_ * chain + a]);
      if (coef != 0.0) op += coef * doubled_operator(chain, a).cast<cplx>();
    }
  }
  return op;
}

Eigen::VectorXcd FockSpace::qp_vacuum(const ModeBasis& basis) const {
  if (basis.n_sites != n_ || basis.chains.size() != 2) throw InvalidParameter("qp_vacuum: basis mismatch");
  const int d = 2 * n_;
  Eigen::MatrixXcd number = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int chain = 0; chain < 2; ++chain) {
    for (int k = 0; k < n_; ++k) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * d);
      v.segment(chain * d, d) = basis.chains[chain].vectors.col(k);
      const Eigen::MatrixXcd dk = linear_operator(v);
      number += dk.adjoint() * dk;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(number);
  if (std::abs(es.eigenvalues()[0]) > 1e-9 || es.eigenvalues()[1] < 0.5) {
    throw NonPhysical("quasiparticle vacuum is not unique");
  }
  return es.eigenvectors().col(0);
}

Eigen::VectorXcd FockSpace::qp_pair_state(const ModeBasis& basis, const Eigen::VectorXcd& vacuum) const {
  const int d = 2 * n_;
  Eigen::VectorXcd v1 = Eigen::VectorXcd::Zero(2 * d);
  Eigen::VectorXcd v2 = Eigen::VectorXcd::Zero(2 * d);
  v1.head(d) = basis.chains[0].vectors.col(0);
  v2.tail(d) = basis.chains[1].vectors.col(0);
  return linear_operator(v1).adjoint() * (linear_operator(v2).adjoint() * vacuum);
}

Eigen::MatrixXcd FockSpace::mzm_parity(const ModeBasis& basis) const {
  const auto g = basis.mzm_vectors();
  const double r2 = std::sqrt(2.0);
  Eigen::MatrixXcd p = -r2 * linear_operator(g[0]);
  for (int l = 1; l < 4; ++l) p = p * (r2 * linear_operator(g[l]));
  return p;
}

OracleTrajectory fock_oracle_ramp(const ChainParams& params, const RampProtocol& protocol,
                                  const SteppingPolicy& policy, std::vector<double> sample_times) {
  check_oracle_size(params);
  protocol.validate(params);
  policy.validate();
  if (sample_times.empty()) sample_times = default_sample_times(protocol.duration());
  const FockSpace fock(params.n_sites);

  auto run = [&](int refine) {
    const StepGrid grid = make_step_grid(protocol, policy, refine);
    const ModeBasis basis_in = tetron_mode_basis(params, protocol.mu_in);
    Eigen::VectorXcd psi = plus_state(fock, basis_in);
    ModeBasis previous = basis_in;
    OracleTrajectory out;
    out.records.resize(sample_times.size());
    out.total_parity.resize(sample_times.size());
    out.norm.resize(sample_times.size());
    run_schedule(
        grid, protocol, sample_times,
        [&](double mu, double dt) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fock.hamiltonian(params, mu));
          const Eigen::MatrixXcd q = es.eigenvectors().cast<cplx>();
          const Eigen::VectorXcd phase = (es.eigenvalues().cast<cplx>() * cplx(0.0, -dt)).array().exp().matrix();
          psi = q * (phase.asDiagonal() * (q.adjoint() * psi));
        },
        [&](std::size_t i, double t) {
          const double mu = ramp_mu(protocol, t);
          ModeBasis basis = tetron_mode_basis(params, mu);
          align_mzm_signs(basis, previous);
          Measurement m = measure(fock, basis, psi);
          m.record.t = t;
          m.record.mu = mu;
          out.records[i] = m.record;
          out.total_parity[i] = m.total_parity;
          out.norm[i] = m.norm;
          previous = std::move(basis);
        });
    return out;
  };
  OracleTrajectory coarse = run(1);
  if (!policy.richardson) return coarse;
  const OracleTrajectory fine = run(2);
  for (std::size_t i = 0; i < coarse.records.size(); ++i) {
    coarse.records[i] = richardson_combine(coarse.records[i], fine.records[i]);
  }
  return coarse;
}

OracleTrajectory fock_oracle_quench(const ChainParams& params, double mu_in, double mu_fin) {
  check_oracle_size(params);
  for (double mu : {mu_in, mu_fin}) {
    if (!is_topological(mu, params.hopping, params.pairing)) throw InvalidParameter("quench endpoint is not topological");
  }
  const FockSpace fock(params.n_sites);
  const ModeBasis basis_in = tetron_mode_basis(params, mu_in);
  ModeBasis basis_fin = tetron_mode_basis(params, mu_fin);
  align_mzm_signs(basis_fin, basis_in);
  Measurement m = measure(fock, basis_fin, plus_state(fock, basis_in));
  m.record.mu = mu_fin;
  OracleTrajectory out;
  out.records = {m.record};
  out.total_parity = {m.total_parity};
  out.norm = {m.norm};
  return out;
}

}  // namespace tleak
