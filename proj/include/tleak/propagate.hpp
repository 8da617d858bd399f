#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tleak/gaussian.hpp"
#include "tleak/model.hpp"

namespace tleak {

// One chain's BdG matrix as H(mu) = fixed + mu * diag(onsite), stored sparse.
struct ChainGenerator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> fixed;
  Eigen::VectorXd onsite;  // -1 on particle rows, +1 on hole rows
  int n_sites = 0;

  static ChainGenerator build(const ChainParams& params);
  // Induced 1-norm (max column sum) of H(mu).
  double norm1(double mu) const;
  // y = H(mu) x
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y, double mu) const;
};

// Truncated Taylor series for exp(-i H dt): `substeps` pieces of length dt/substeps,
// each summed to `order` terms.
struct TaylorPlan {
  int substeps = 1;
  int order = 1;
  double dt_sub = 0.0;
};

TaylorPlan taylor_plan(double norm1, double dt);

// W <- exp(-i H(mu) dt) W, one column per OpenMP work item.
void propagate_columns(Eigen::MatrixXcd& w, const ChainGenerator& gen, double mu, double dt);

// Same arithmetic on a single thread. Bit-identical to propagate_columns.
void propagate_columns_serial(Eigen::MatrixXcd& w, const ChainGenerator& gen, double mu, double dt);

// exp(-i H dt) of one chain block from a dense eigendecomposition.
Eigen::MatrixXcd exact_chain_propagator(const BdGMatrix& chain, double dt);

// Reference step on the full correlation matrix: Gamma <- U^* Gamma U^T with U = exp(-i H dt)
// built from the eigendecomposition of the (block-diagonal) tetron matrix.
void propagate_correlation_reference(CorrelationMatrix& g, const BdGMatrix& tetron, double dt);

}  // namespace tleak
