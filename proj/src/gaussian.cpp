#include "tleak/gaussian.hpp"

#include <cmath>
#include <string>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

constexpr double kImagTol = 1e-8;
constexpr double kAsymTol = 1e-10;
constexpr double kDetFloor = -1e-10;

void check_square(const Eigen::MatrixXcd& m, int n_sites, const char* what) {
  if (m.rows() != m.cols() || n_sites < 1 || m.rows() % (2 * n_sites) != 0) {
    throw InvalidParameter(std::string(what) + ": dimension does not match n_sites");
  }
}

}  // namespace

const char* to_string(QubitState s) {
  switch (s) {
    case QubitState::zero: return "zero";
    case QubitState::one: return "one";
    case QubitState::plus: return "plus";
  }
  return "?";
}

QubitState qubit_state_from_string(const std::string& s) {
  if (s == "zero" || s == "0") return QubitState::zero;
  if (s == "one" || s == "1") return QubitState::one;
  if (s == "plus" || s == "+") return QubitState::plus;
  throw InvalidParameter("unknown qubit state '" + s + "'");
}

CorrelationMatrix ground_state_qp_correlation(int n_sites, QubitState label) {
  if (n_sites < 2) throw InvalidParameter("n_sites must be >= 2");
  const int n = n_sites;
  const int d = 4 * n;
  CorrelationMatrix u;
  u.n_sites = n;
  u.basis = {BasisKind::mode, 0.0, 0.0};
  u.entries = Eigen::MatrixXcd::Zero(d, d);
  for (int chain = 0; chain < 2; ++chain) {
    const int b = 2 * n * chain;
    for (int k = 0; k < n; ++k) u.entries(b + n + k, b + n + k) = 1.0;  // <d d^dag> = 1
  }
  if (label == QubitState::zero) return u;

  const double occ = label == QubitState::one ? 1.0 : 0.5;
  for (int chain = 0; chain < 2; ++chain) {
    const int b = 2 * n * chain;
    u.entries(b, b) = occ;
    u.entries(b + n, b + n) = 1.0 - occ;
  }
  if (label == QubitState::plus) {
    // <d1^dag d2^dag> = 1/2 and <d1 d2> = -1/2
    u.entries(0, 3 * n) = u.entries(3 * n, 0) = 0.5;
    u.entries(n, 2 * n) = u.entries(2 * n, n) = -0.5;
  }
  return u;
}

CorrelationMatrix rotate_to_site_basis(const CorrelationMatrix& u, const ModeBasis& basis) {
  check_square(u.entries, u.n_sites, "rotate_to_site_basis");
  if (u.dim() != basis.dim()) throw InvalidParameter("rotate_to_site_basis: basis dimension mismatch");
  if (u.basis.kind != BasisKind::mode) throw InvalidParameter("rotate_to_site_basis: input is not in a mode basis");
  const Eigen::MatrixXcd v = basis.full_vectors();
  CorrelationMatrix g;
  g.n_sites = u.n_sites;
  g.basis = {BasisKind::site, 0.0, u.basis.t};
  g.entries = v.conjugate() * u.entries * v.transpose();
  return g;
}

CorrelationMatrix rotate_to_mode_basis(const CorrelationMatrix& g, const ModeBasis& basis, double t) {
  check_square(g.entries, g.n_sites, "rotate_to_mode_basis");
  if (g.dim() != basis.dim()) throw InvalidParameter("rotate_to_mode_basis: basis dimension mismatch");
  if (g.basis.kind != BasisKind::site) throw InvalidParameter("rotate_to_mode_basis: input is not in the site basis");
  const Eigen::MatrixXcd v = basis.full_vectors();
  CorrelationMatrix u;
  u.n_sites = g.n_sites;
  u.basis = {BasisKind::mode, basis.mu, t};
  u.entries = v.transpose() * g.entries * v.conjugate();
  return u;
}

CovarianceMatrix covariance_from_correlation(const CorrelationMatrix& g) {
  check_square(g.entries, g.n_sites, "covariance_from_correlation");
  const int n = g.n_sites;
  const int d = 2 * n;
  const int chains = g.dim() / d;
  const cplx i1(0.0, 1.0);
  Eigen::MatrixXcd m(g.dim(), g.dim());
  for (int a = 0; a < chains; ++a) {
    for (int b = 0; b < chains; ++b) {
      Eigen::MatrixXcd gp = 2.0 * g.entries.block(a * d, b * d, d, d);
      if (a == b) gp -= Eigen::MatrixXcd::Identity(d, d);
      const auto A = gp.topLeftCorner(n, n);
      const auto B = gp.topRightCorner(n, n);
      const auto C = gp.bottomLeftCorner(n, n);
      const auto D = gp.bottomRightCorner(n, n);
      auto blk = m.block(a * d, b * d, d, d);
      blk.topLeftCorner(n, n) = -0.5 * i1 * (A + B + C + D);
      blk.topRightCorner(n, n) = 0.5 * (B + D - A - C);
      blk.bottomLeftCorner(n, n) = 0.5 * (A - C + B - D);
      blk.bottomRightCorner(n, n) = -0.5 * i1 * (A - C - B + D);
    }
  }
  const double imag = m.imag().cwiseAbs().maxCoeff();
  if (imag > kImagTol) {
    throw NonPhysical("covariance matrix has imaginary residue " + std::to_string(imag));
  }
  CovarianceMatrix out;
  out.n_sites = n;
  out.basis = g.basis;
  out.entries = m.real();
  return out;
}

double pfaffian4(const Eigen::Matrix4d& a) {
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > kAsymTol) {
    throw InvalidParameter("pfaffian4: matrix is not antisymmetric");
  }
  return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
}

double parity_expectation(const CovarianceMatrix& m) {
  const int n = m.n_sites;
  if (m.dim() != 4 * n) throw InvalidParameter("parity_expectation needs a tetron covariance matrix");
  if (m.basis.kind != BasisKind::mode) throw InvalidParameter("parity_expectation needs the mode basis");
  const int idx[4] = {0, n, 2 * n, 3 * n};
  Eigen::Matrix4d sub;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) sub(i, j) = m.entries(idx[i], idx[j]);
  }
  return pfaffian4(sub);
}

double overlap_sq(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  if (a.dim() != b.dim() || a.n_sites != b.n_sites) throw InvalidParameter("overlap_sq: dimension mismatch");
  if (a.basis.kind != b.basis.kind) throw InvalidParameter("overlap_sq: basis mismatch");
  const Eigen::MatrixXd s = 0.5 * (a.entries + b.entries);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
  const double det = lu.determinant();
  if (!std::isfinite(det) || det < kDetFloor) {
    throw NonPhysical("overlap_sq: negative determinant " + std::to_string(det) + " (basis mismatch?)");
  }
  return det <= 0.0 ? 0.0 : std::sqrt(det);
}

double purity_defect(const CovarianceMatrix& m) {
  const Eigen::MatrixXd e = m.entries * m.entries.transpose() - Eigen::MatrixXd::Identity(m.dim(), m.dim());
  return e.cwiseAbs().maxCoeff();
}

}  // namespace tleak
