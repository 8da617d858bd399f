#include "tleak/propagate.hpp"

#include <cmath>
#include <vector>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

constexpr double kMaxSubstepNorm = 0.5;
constexpr double kTaylorTol = 1e-17;
constexpr int kMaxOrder = 40;

void propagate_column(Eigen::VectorXcd& x, Eigen::VectorXcd& term, Eigen::VectorXcd& next,
                      const ChainGenerator& gen, double mu, const TaylorPlan& plan) {
  const cplx mi(0.0, -plan.dt_sub);
  for (int s = 0; s < plan.substeps; ++s) {
    term = x;
    for (int k = 1; k <= plan.order; ++k) {
      gen.apply(term, next, mu);
      term = next * (mi / static_cast<double>(k));
      x += term;
    }
  }
}

}  // namespace

ChainGenerator ChainGenerator::build(const ChainParams& params) {
  const BdGMatrix h0 = build_chain_bdg(params, 0.0);
  const int d = h0.dim();
  ChainGenerator gen;
  gen.n_sites = params.n_sites;
  gen.fixed = h0.entries.real().sparseView();
  gen.fixed.makeCompressed();
  gen.onsite.resize(d);
  gen.onsite.head(params.n_sites).setConstant(-1.0);
  gen.onsite.tail(params.n_sites).setConstant(1.0);
  return gen;
}

double ChainGenerator::norm1(double mu) const {
  // H is symmetric, so row sums equal column sums.
  double best = 0.0;
  for (int r = 0; r < fixed.outerSize(); ++r) {
    double diag = mu * onsite[r];
    double s = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(fixed, r); it; ++it) {
      if (it.col() == r) diag += it.value();
      else s += std::abs(it.value());
    }
    best = std::max(best, s + std::abs(diag));
  }
  return best;
}

void ChainGenerator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y, double mu) const {
  const int* outer = fixed.outerIndexPtr();
  const int* inner = fixed.innerIndexPtr();
  const double* val = fixed.valuePtr();
  const Eigen::Index rows = fixed.rows();
  y.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    cplx acc = mu * onsite[r] * x[r];
    for (int p = outer[r]; p < outer[r + 1]; ++p) acc += val[p] * x[inner[p]];
    y[r] = acc;
  }
}

TaylorPlan taylor_plan(double norm1, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be finite and >= 0");
  TaylorPlan plan;
  const double theta_total = norm1 * dt;
  plan.substeps = std::max(1, static_cast<int>(std::ceil(theta_total / kMaxSubstepNorm)));
  plan.dt_sub = dt / plan.substeps;
  const double theta = norm1 * plan.dt_sub;
  // smallest K with theta^{K+1}/(K+1)! <= tol
  double bound = theta;
  int k = 0;
  while (bound > kTaylorTol && k < kMaxOrder) {
    ++k;
    bound *= theta / (k + 1);
  }
  plan.order = std::max(k, 1);
  return plan;
}

void propagate_columns(Eigen::MatrixXcd& w, const ChainGenerator& gen, double mu, double dt) {
  const TaylorPlan plan = taylor_plan(gen.norm1(mu), dt);
  const int cols = static_cast<int>(w.cols());
#pragma omp parallel
  {
    Eigen::VectorXcd x, term, next;
#pragma omp for schedule(static)
    for (int c = 0; c < cols; ++c) {
      x = w.col(c);
      propagate_column(x, term, next, gen, mu, plan);
      w.col(c) = x;
    }
  }
}

void propagate_columns_serial(Eigen::MatrixXcd& w, const ChainGenerator& gen, double mu, double dt) {
  const TaylorPlan plan = taylor_plan(gen.norm1(mu), dt);
  Eigen::VectorXcd x, term, next;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    x = w.col(c);
    propagate_column(x, term, next, gen, mu, plan);
    w.col(c) = x;
  }
}

Eigen::MatrixXcd exact_chain_propagator(const BdGMatrix& chain, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(chain.entries);
  if (es.info() != Eigen::Success) throw Error("propagator eigensolver failed");
  const Eigen::VectorXcd phase =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -dt)).array().exp().matrix();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

void propagate_correlation_reference(CorrelationMatrix& g, const BdGMatrix& tetron, double dt) {
  if (g.basis.kind != BasisKind::site) throw InvalidParameter("reference propagation needs the site basis");
  if (g.dim() != tetron.dim()) throw InvalidParameter("reference propagation: dimension mismatch");
  const int d = 2 * tetron.n_sites;
  const int chains = tetron.n_chains;
  std::vector<Eigen::MatrixXcd> u(chains);
  for (int c = 0; c < chains; ++c) {
    BdGMatrix block = tetron;
    block.entries = tetron.chain_block(c);
    block.n_chains = 1;
    u[c] = (c > 0 && block.entries == tetron.chain_block(0)) ? u[0] : exact_chain_propagator(block, dt);
  }
  for (int a = 0; a < chains; ++a) {
    for (int b = 0; b < chains; ++b) {
      auto blk = g.entries.block(a * d, b * d, d, d);
      blk = (u[a].conjugate() * blk * u[b].transpose()).eval();
    }
  }
}

}  // namespace tleak
