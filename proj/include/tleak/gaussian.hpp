#pragma once

#include <string>

#include <Eigen/Dense>

#include "tleak/model.hpp"

namespace tleak {

enum class BasisKind { site, mode };

// Which single-particle basis a Gaussian-state matrix is written in. For the mode basis,
// `mu` and `t` identify the instantaneous Hamiltonian the modes belong to.
struct BasisTag {
  BasisKind kind = BasisKind::site;
  double mu = 0.0;
  double t = 0.0;

  bool operator==(const BasisTag&) const = default;
};

// Gamma_ij = <c_i^dag c_j> over the doubled operator vector
// (c_1..c_N, c_1^dag..c_N^dag) of chain 1 followed by the same for chain 2.
struct CorrelationMatrix {
  Eigen::MatrixXcd entries;
  int n_sites = 0;
  BasisTag basis;

  int dim() const { return static_cast<int>(entries.rows()); }
};

// Real antisymmetric M with <r_k r_l> = delta_kl / 2 + (i/2) M_kl, where
// r_j = (c_j + c_j^dag)/sqrt2 and r_{j+N} = i (c_j^dag - c_j)/sqrt2 per chain.
struct CovarianceMatrix {
  Eigen::MatrixXd entries;
  int n_sites = 0;
  BasisTag basis;

  int dim() const { return static_cast<int>(entries.rows()); }
};

enum class QubitState { zero, one, plus };

const char* to_string(QubitState s);
QubitState qubit_state_from_string(const std::string& s);

// Computational states of the tetron written in their own quasiparticle basis.
// |0> is the quasiparticle vacuum, |1> = d_0^(1)dag d_0^(2)dag |0>, |+> = (|0> + |1>)/sqrt2.
CorrelationMatrix ground_state_qp_correlation(int n_sites, QubitState label);

// Gamma = V^* Upsilon V^T and its inverse.
CorrelationMatrix rotate_to_site_basis(const CorrelationMatrix& u, const ModeBasis& basis);
CorrelationMatrix rotate_to_mode_basis(const CorrelationMatrix& g, const ModeBasis& basis,
                                       double t = 0.0);

// M = -i Omega^* (2 Gamma - 1) Omega^T, evaluated block by block. Throws NonPhysical when
// the result carries an imaginary part above 1e-8.
CovarianceMatrix covariance_from_correlation(const CorrelationMatrix& g);

double pfaffian4(const Eigen::Matrix4d& a);

// <P> = -<gamma_1 gamma_2 gamma_3 gamma_4> from a covariance matrix in the mode basis.
double parity_expectation(const CovarianceMatrix& m);

// |<A|B>|^2 = sqrt(det((M_A + M_B) / 2)) for pure Gaussian states.
double overlap_sq(const CovarianceMatrix& a, const CovarianceMatrix& b);

// max |M M^T - 1|, zero for a pure state.
double purity_defect(const CovarianceMatrix& m);

}  // namespace tleak
