#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace tleak {

using cplx = std::complex<double>;

// Static parameters of one Kitaev chain (both tetron chains share them).
struct ChainParams {
  int n_sites = 40;
  double hopping = 0.5;  // w
  double pairing = 0.5;  // Delta

  void validate() const;
};

// Linear chemical-potential ramp mu(t) = mu_in + sign * rate * t, 0 <= t <= T.
struct RampProtocol {
  double mu_in = 0.0;
  double mu_fin = 0.03;
  double rate = 1e-3;

  double duration() const;
  double mu_at(double t) const;
  // Throws InvalidParameter unless rate > 0 and every mu on the ramp is topological.
  void validate(const ChainParams& params) const;
};

// Single-particle BdG matrix in the (c_1..c_N, c_1^dag..c_N^dag [, chain 2 ...]) ordering.
struct BdGMatrix {
  Eigen::MatrixXcd entries;
  double mu = 0.0;
  int n_sites = 0;
  int n_chains = 1;
  double energy_scale = 0.0;  // 2 max(|w|, |Delta|); 0 means "derive from the spectrum"

  int dim() const { return static_cast<int>(entries.rows()); }
  Eigen::MatrixXcd chain_block(int chain) const;
};

// Eigen-data of one chain. Columns of `vectors` are |d_0>..|d_{N-1}>, then tau_x kappa |d_k>.
struct ChainModes {
  Eigen::VectorXd energies;      // eps_0 (signed, exponentially small) then bulk eps_k > 0
  Eigen::MatrixXcd vectors;      // 2N x 2N unitary
  Eigen::VectorXcd gamma_left;   // empty until resolve_mzms
  Eigen::VectorXcd gamma_right;
};

struct ModeBasis {
  int n_sites = 0;
  double mu = 0.0;
  std::vector<ChainModes> chains;  // one per chain (1 for a single chain, 2 for the tetron)

  bool mzms_resolved() const;
  int dim() const { return 2 * n_sites * static_cast<int>(chains.size()); }
  // Block-diagonal unitary V over all chains.
  Eigen::MatrixXcd full_vectors() const;
  // gamma_1..gamma_4 for the tetron (left/right of chain 1, then chain 2), embedded in 4N space.
  std::array<Eigen::VectorXcd, 4> mzm_vectors() const;
};

// tau_x kappa acting on a vector in one chain's 2N space (or any multiple of it).
Eigen::VectorXcd particle_hole_conjugate(const Eigen::VectorXcd& v, int n_sites);
Eigen::MatrixXcd particle_hole_conjugate(const Eigen::MatrixXcd& m, int n_sites);

BdGMatrix build_chain_bdg(const ChainParams& params, double mu);
BdGMatrix build_tetron_bdg(const ChainParams& params, double mu);

// Diagonalizes every chain block independently and pairs each eps_k with its tau_x kappa
// partner. The zero pair is chosen as the lowest |eps| pair of each chain.
ModeBasis diagonalize_chain(const BdGMatrix& h);

// Rotates each chain's zero pair into Majorana vectors maximally localized on the left
// and right halves of the chain and rebuilds |d_0> from them.
ModeBasis resolve_mzms(ModeBasis basis);

// Flips the sign of each MZM of `basis` whose overlap with the matching MZM of `reference`
// is negative, then rebuilds |d_0> (and the sign of eps_0) to match.
void align_mzm_signs(ModeBasis& basis, const ModeBasis& reference);

// Convenience: diagonalize and resolve the tetron at chemical potential mu.
ModeBasis tetron_mode_basis(const ChainParams& params, double mu);

// Weight of a single-chain BdG vector on the left half of the chain (middle site of an
// odd chain counted with weight 1/2).
double left_half_weight(const Eigen::VectorXcd& v, int n_sites);

// H = sum_k eps_k (|d_k><d_k| - tau_x kappa |d_k><d_k| kappa tau_x) over all chains.
Eigen::MatrixXcd reconstruct_bdg(const ModeBasis& basis);

double bulk_energy(double k, double mu, double hopping, double pairing);
double band_gap(double mu, double hopping);
bool is_topological(double mu, double hopping, double pairing);

}  // namespace tleak
