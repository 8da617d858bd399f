#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tleak/dynamics.hpp"
#include "tleak/model.hpp"

namespace tleak {

// Largest chain length the many-body check accepts (Fock dimension 2^{2N} <= 64).
inline constexpr int kMaxOracleSites = 3;

struct OracleTrajectory {
  std::vector<LeakageRecord> records;
  std::vector<double> total_parity;  // <(-1)^{N_f}> at each sample
  std::vector<double> norm;          // |psi| at each sample
};

// Occupation-number representation of the tetron: mode m = chain * N + site,
// Jordan-Wigner ordered by m.
class FockSpace {
 public:
  explicit FockSpace(int n_sites);

  int n_sites() const { return n_; }
  int dim() const { return dim_; }
  int modes() const { return 2 * n_; }

  // Annihilator of mode m.
  const Eigen::MatrixXd& annihilator(int m) const { return c_[m]; }
  // Entry `a` of one chain's doubled operator vector (c_1..c_N, c_1^dag..c_N^dag).
  Eigen::MatrixXd doubled_operator(int chain, int a) const;

  // -mu N_f - w sum (c_j^dag c_{j+1} + h.c.) + Delta sum (c_j c_{j+1} + h.c.) on both chains.
  Eigen::MatrixXd hamiltonian(const ChainParams& params, double mu) const;
  Eigen::VectorXd total_parity_diagonal() const;

  // sum_a conj(v_a) chat_a for a vector v on both chains (length 4N).
  Eigen::MatrixXcd linear_operator(const Eigen::VectorXcd& v) const;

  // Quasiparticle vacuum |Omega> of `basis` and |1> = d_0^(1)dag d_0^(2)dag |Omega>.
  Eigen::VectorXcd qp_vacuum(const ModeBasis& basis) const;
  Eigen::VectorXcd qp_pair_state(const ModeBasis& basis, const Eigen::VectorXcd& vacuum) const;
  // -gamma_1 gamma_2 gamma_3 gamma_4 of `basis`.
  Eigen::MatrixXcd mzm_parity(const ModeBasis& basis) const;

 private:
  int n_;
  int dim_;
  std::vector<Eigen::MatrixXd> c_;
};

OracleTrajectory fock_oracle_ramp(const ChainParams& params, const RampProtocol& protocol,
                                  const SteppingPolicy& policy, std::vector<double> sample_times = {});

OracleTrajectory fock_oracle_quench(const ChainParams& params, double mu_in, double mu_fin);

}  // namespace tleak
