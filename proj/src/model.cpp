#include "tleak/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

// Relative tolerance used when breaking ties between equal-magnitude entries.
constexpr double kTieTolerance = 1e-9;
constexpr double kZeroSubspaceTol = 1e-6;   // times the energy scale 2w
constexpr double kZeroPairIsolation = 0.5;  // eps_0 must sit below half of eps_1

int largest_entry(const Eigen::VectorXcd& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= (1.0 - kTieTolerance) * vmax) return static_cast<int>(i);
  }
  return 0;
}

// Global phase so that the largest-magnitude entry is positive real.
void fix_phase(Eigen::VectorXcd& v) {
  const cplx z = v[largest_entry(v)];
  if (std::abs(z) > 0.0) v *= std::conj(z) / std::abs(z);
}

// Majorana vectors only admit a sign. Make the dominant part (real or imaginary) of the
// largest entry positive.
void fix_majorana_sign(Eigen::VectorXcd& v) {
  const cplx z = v[largest_entry(v)];
  const double s = std::abs(z.real()) >= std::abs(z.imag()) ? z.real() : z.imag();
  if (s < 0.0) v = -v;
}

struct MajoranaPair {
  Eigen::VectorXcd first;
  Eigen::VectorXcd second;
};

// Orthonormal pair of tau_x kappa-invariant vectors spanning the same space as z1, z2.
MajoranaPair majorana_frame(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2, int n) {
  std::vector<Eigen::VectorXcd> cand;
  for (const auto* z : {&z1, &z2}) {
    const Eigen::VectorXcd pz = particle_hole_conjugate(*z, n);
    cand.push_back(*z + pz);
    cand.push_back(cplx(0.0, 1.0) * (*z - pz));
  }
  auto pick = [&](const std::vector<Eigen::VectorXcd>& vs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vs.size(); ++i) {
      if (vs[i].norm() > vs[best].norm()) best = i;
    }
    return best;
  };
  const std::size_t i1 = pick(cand);
  Eigen::VectorXcd m1 = cand[i1].normalized();
  std::vector<Eigen::VectorXcd> rest;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (i == i1) continue;
    rest.push_back(cand[i] - m1.dot(cand[i]).real() * m1);
  }
  Eigen::VectorXcd m2 = rest[pick(rest)];
  if (m2.norm() < 1e-8) {
    throw DegenerateSubspace("zero-mode subspace does not contain two independent Majorana vectors");
  }
  m2.normalize();
  return {m1, m2};
}

ChainModes diagonalize_block(const Eigen::MatrixXcd& h, int n, double scale) {
  const int dim = 2 * n;
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success) throw Error("BdG eigensolver failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw Error("BdG eigensolver failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }
  if (scale <= 0.0) scale = evals.cwiseAbs().maxCoeff();

  // Spectrum is +-symmetric; the zero pair occupies the two middle slots.
  const double eps0 = 0.5 * (evals[n] - evals[n - 1]);
  const double eps1 = evals[n + 1];
  if (eps1 <= kZeroSubspaceTol * scale) {
    std::ostringstream os;
    os << "near-zero subspace has dimension > 2 (eps_1 = " << eps1 << ")";
    throw DegenerateSubspace(os.str());
  }
  if (eps0 >= kZeroPairIsolation * eps1) {
    std::ostringstream os;
    os << "no isolated zero pair (eps_0 = " << eps0 << ", eps_1 = " << eps1 << ")";
    throw DegenerateSubspace(os.str());
  }

  ChainModes modes;
  modes.energies.resize(n);
  modes.vectors.resize(dim, dim);
  for (int k = 1; k < n; ++k) {
    Eigen::VectorXcd v = evecs.col(n + k);
    fix_phase(v);
    modes.energies[k] = evals[n + k];
    modes.vectors.col(k) = v;
    modes.vectors.col(n + k) = particle_hole_conjugate(v, n);
  }

  auto [m1, m2] = majorana_frame(evecs.col(n - 1), evecs.col(n), n);
  const cplx i1(0.0, 1.0);
  Eigen::VectorXcd d0 = (m1 - i1 * m2) / std::sqrt(2.0);
  double e0 = d0.dot(h * d0).real();
  if (e0 < 0.0) {
    d0 = particle_hole_conjugate(d0, n);
    e0 = -e0;
  }
  fix_phase(d0);
  modes.energies[0] = e0;
  modes.vectors.col(0) = d0;
  modes.vectors.col(n) = particle_hole_conjugate(d0, n);
  return modes;
}

double golden_section_max(const auto& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void ChainParams::validate() const {
  if (n_sites < 2) throw InvalidParameter("n_sites must be >= 2");
  if (!std::isfinite(hopping) || !std::isfinite(pairing)) {
    throw InvalidParameter("hopping and pairing must be finite");
  }
  if (hopping == 0.0 && pairing == 0.0) {
    throw InvalidParameter("hopping and pairing cannot both vanish");
  }
}

double RampProtocol::duration() const { return std::abs(mu_fin - mu_in) / rate; }

double RampProtocol::mu_at(double t) const {
  const double dir = mu_fin >= mu_in ? 1.0 : -1.0;
  return mu_in + dir * rate * t;
}

void RampProtocol::validate(const ChainParams& params) const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidParameter("rate must be > 0");
  if (!std::isfinite(mu_in) || !std::isfinite(mu_fin)) throw InvalidParameter("mu must be finite");
  // |mu| is convex along the ramp, so the endpoints decide.
  for (double mu : {mu_in, mu_fin}) {
    if (!is_topological(mu, params.hopping, params.pairing)) {
      std::ostringstream os;
      os << "mu = " << mu << " leaves the topological phase";
      throw InvalidParameter(os.str());
    }
  }
}

Eigen::MatrixXcd BdGMatrix::chain_block(int chain) const {
  const int d = 2 * n_sites;
  return entries.block(chain * d, chain * d, d, d);
}

bool ModeBasis::mzms_resolved() const {
  return !chains.empty() && std::all_of(chains.begin(), chains.end(), [](const ChainModes& c) {
    return c.gamma_left.size() > 0 && c.gamma_right.size() > 0;
  });
}

Eigen::MatrixXcd ModeBasis::full_vectors() const {
  const int d = 2 * n_sites;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim(), dim());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    v.block(c * d, c * d, d, d) = chains[c].vectors;
  }
  return v;
}

std::array<Eigen::VectorXcd, 4> ModeBasis::mzm_vectors() const {
  if (chains.size() != 2 || !mzms_resolved()) {
    throw InvalidParameter("mzm_vectors needs a tetron basis with resolved MZMs");
  }
  const int d = 2 * n_sites;
  std::array<Eigen::VectorXcd, 4> out;
  for (auto& g : out) g = Eigen::VectorXcd::Zero(2 * d);
  out[0].head(d) = chains[0].gamma_left;
  out[1].head(d) = chains[0].gamma_right;
  out[2].tail(d) = chains[1].gamma_left;
  out[3].tail(d) = chains[1].gamma_right;
  return out;
}

Eigen::VectorXcd particle_hole_conjugate(const Eigen::VectorXcd& v, int n_sites) {
  const int d = 2 * n_sites;
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index b = 0; b < v.size(); b += d) {
    out.segment(b, n_sites) = v.segment(b + n_sites, n_sites).conjugate();
    out.segment(b + n_sites, n_sites) = v.segment(b, n_sites).conjugate();
  }
  return out;
}

Eigen::MatrixXcd particle_hole_conjugate(const Eigen::MatrixXcd& m, int n_sites) {
  // (tau_x kappa) M (tau_x kappa)^{-1} = tau_x M^* tau_x
  const int d = 2 * n_sites;
  Eigen::VectorXi perm(m.rows());
  for (Eigen::Index b = 0; b < m.rows(); b += d) {
    for (int j = 0; j < n_sites; ++j) {
      perm[b + j] = static_cast<int>(b + n_sites + j);
      perm[b + n_sites + j] = static_cast<int>(b + j);
    }
  }
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = std::conj(m(perm[i], perm[j]));
  }
  return out;
}

BdGMatrix build_chain_bdg(const ChainParams& params, double mu) {
  params.validate();
  const int n = params.n_sites;
  const double w = params.hopping;
  const double delta = params.pairing;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = -mu;
    h(n + j, n + j) = mu;
  }
  for (int j = 0; j + 1 < n; ++j) {
    // hopping: particle block -w, hole block +w
    h(j, j + 1) = h(j + 1, j) = -w;
    h(n + j, n + j + 1) = h(n + j + 1, n + j) = w;
    // pairing Delta c_j c_{j+1} + h.c.: upper-right block D, lower-left -D
    h(j, n + j + 1) = -delta;
    h(j + 1, n + j) = delta;
    h(n + j, j + 1) = delta;
    h(n + j + 1, j) = -delta;
  }
  BdGMatrix out;
  out.entries = h.cast<cplx>();
  out.mu = mu;
  out.n_sites = n;
  out.n_chains = 1;
  out.energy_scale = 2.0 * std::max(std::abs(w), std::abs(delta));
  return out;
}

BdGMatrix build_tetron_bdg(const ChainParams& params, double mu) {
  const BdGMatrix chain = build_chain_bdg(params, mu);
  const int d = chain.dim();
  BdGMatrix out = chain;
  out.n_chains = 2;
  out.entries = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.entries.topLeftCorner(d, d) = chain.entries;
  out.entries.bottomRightCorner(d, d) = chain.entries;
  return out;
}

ModeBasis diagonalize_chain(const BdGMatrix& h) {
  const int n = h.n_sites;
  if (n < 2 || h.n_chains < 1 || h.dim() != 2 * n * h.n_chains) {
    throw InvalidParameter("BdG matrix has inconsistent dimensions");
  }
  ModeBasis basis;
  basis.n_sites = n;
  basis.mu = h.mu;
  for (int c = 0; c < h.n_chains; ++c) {
    const Eigen::MatrixXcd block = h.chain_block(c);
    if (c > 0 && block == h.chain_block(0)) {
      basis.chains.push_back(basis.chains.front());
      continue;
    }
    basis.chains.push_back(diagonalize_block(block, n, h.energy_scale));
  }
  return basis;
}

double left_half_weight(const Eigen::VectorXcd& v, int n_sites) {
  double w = 0.0;
  for (int j = 0; j < n_sites; ++j) {
    const double site = std::norm(v[j]) + std::norm(v[n_sites + j]);
    if (2 * j + 1 < n_sites) {
      w += site;
    } else if (2 * j + 1 == n_sites) {
      w += 0.5 * site;
    }
  }
  return w;
}

ModeBasis resolve_mzms(ModeBasis basis) {
  const int n = basis.n_sites;
  const cplx i1(0.0, 1.0);
  for (std::size_t c = 0; c < basis.chains.size(); ++c) {
    if (c > 0 && basis.chains[c].vectors == basis.chains[0].vectors) {
      basis.chains[c] = basis.chains[0];
      continue;
    }
    ChainModes& modes = basis.chains[c];
    if (modes.vectors.rows() != 2 * n) throw DegenerateSubspace("chain has no zero pair");
    const Eigen::VectorXcd d0 = modes.vectors.col(0);
    const Eigen::VectorXcd d0c = modes.vectors.col(n);
    const Eigen::VectorXcd m1 = (d0 + d0c) / std::sqrt(2.0);
    const Eigen::VectorXcd m2 = i1 * (d0 - d0c) / std::sqrt(2.0);

    auto gamma = [&](double theta) -> Eigen::VectorXcd {
      return std::cos(theta) * m1 + std::sin(theta) * m2;
    };
    auto weight = [&](double theta) { return left_half_weight(gamma(theta), n); };

    // The weight is a pi-periodic sinusoid in theta: bracket its maximum on a coarse grid.
    constexpr int kCoarse = 32;
    const double step = std::numbers::pi / kCoarse;
    int best = 0;
    double best_w = weight(0.0);
    for (int i = 1; i < kCoarse; ++i) {
      const double w = weight(i * step);
      if (w > best_w) {
        best_w = w;
        best = i;
      }
    }
    const double theta = golden_section_max(weight, (best - 1) * step, (best + 1) * step, 1e-10);

    Eigen::VectorXcd left = gamma(theta);
    Eigen::VectorXcd right = -std::sin(theta) * m1 + std::cos(theta) * m2;
    fix_majorana_sign(left);
    fix_majorana_sign(right);

    const Eigen::VectorXcd new_d0 = (left - i1 * right) / std::sqrt(2.0);
    // Energy of the rebuilt mode within the old +-eps_0 eigenpair.
    modes.energies[0] *= std::norm(d0.dot(new_d0)) - std::norm(d0c.dot(new_d0));
    modes.vectors.col(0) = new_d0;
    modes.vectors.col(n) = particle_hole_conjugate(new_d0, n);
    modes.gamma_left = std::move(left);
    modes.gamma_right = std::move(right);
  }
  return basis;
}

void align_mzm_signs(ModeBasis& basis, const ModeBasis& reference) {
  if (!basis.mzms_resolved() || !reference.mzms_resolved() ||
      basis.chains.size() != reference.chains.size() || basis.n_sites != reference.n_sites) {
    throw InvalidParameter("align_mzm_signs: incompatible bases");
  }
  const int n = basis.n_sites;
  const cplx i1(0.0, 1.0);
  for (std::size_t c = 0; c < basis.chains.size(); ++c) {
    ChainModes& modes = basis.chains[c];
    const ChainModes& ref = reference.chains[c];
    bool flip_left = ref.gamma_left.dot(modes.gamma_left).real() < 0.0;
    bool flip_right = ref.gamma_right.dot(modes.gamma_right).real() < 0.0;
    if (!flip_left && !flip_right) continue;
    if (flip_left) modes.gamma_left = -modes.gamma_left;
    if (flip_right) modes.gamma_right = -modes.gamma_right;
    const Eigen::VectorXcd d0 = (modes.gamma_left - i1 * modes.gamma_right) / std::sqrt(2.0);
    modes.vectors.col(0) = d0;
    modes.vectors.col(n) = particle_hole_conjugate(d0, n);
    // One flip swaps d_0 and d_0^dag.
    if (flip_left != flip_right) modes.energies[0] = -modes.energies[0];
  }
}

ModeBasis tetron_mode_basis(const ChainParams& params, double mu) {
  return resolve_mzms(diagonalize_chain(build_tetron_bdg(params, mu)));
}

Eigen::MatrixXcd reconstruct_bdg(const ModeBasis& basis) {
  const int n = basis.n_sites;
  const int d = 2 * n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  for (std::size_t c = 0; c < basis.chains.size(); ++c) {
    const auto& modes = basis.chains[c];
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < n; ++k) {
      const auto& p = modes.vectors.col(k);
      const auto& q = modes.vectors.col(n + k);
      block += modes.energies[k] * (p * p.adjoint() - q * q.adjoint());
    }
    h.block(c * d, c * d, d, d) = block;
  }
  return h;
}

double bulk_energy(double k, double mu, double hopping, double pairing) {
  const double a = mu + 2.0 * hopping * std::cos(k);
  const double b = 2.0 * pairing * std::sin(k);
  return std::sqrt(a * a + b * b);
}

double band_gap(double mu, double hopping) { return std::abs(2.0 * hopping - mu); }

bool is_topological(double mu, double hopping, double pairing) {
  return std::abs(mu) < 2.0 * std::abs(hopping) && pairing != 0.0;
}

}  // namespace tleak
