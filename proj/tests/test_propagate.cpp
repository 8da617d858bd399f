#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "tleak/propagate.hpp"

using namespace tleak;

namespace {

Eigen::MatrixXcd random_columns(int rows, int cols, unsigned seed) {
  std::srand(seed);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Random(rows, cols);
  return w;
}

}  // namespace

TEST_CASE("ChainGenerator matches the dense BdG matrix") {
  const ChainParams p{7, 0.5, 0.3};
  const ChainGenerator gen = ChainGenerator::build(p);
  for (double mu : {0.0, 0.05, -0.3}) {
    const Eigen::MatrixXcd dense = build_chain_bdg(p, mu).entries;
    const Eigen::VectorXcd x = random_columns(14, 1, 11).col(0);
    Eigen::VectorXcd y(14);
    gen.apply(x, y, mu);
    CHECK((y - dense * x).norm() < 1e-14);
    CHECK(gen.norm1(mu) == doctest::Approx(dense.cwiseAbs().colwise().sum().maxCoeff()).epsilon(1e-14));
  }
}

TEST_CASE("taylor_plan bounds the truncation error") {
  const TaylorPlan small = taylor_plan(2.0, 0.01);
  CHECK(small.substeps == 1);
  CHECK(small.order >= 5);
  const TaylorPlan big = taylor_plan(2.0, 10.0);
  CHECK(big.substeps >= 40);
  CHECK(big.dt_sub * big.substeps == doctest::Approx(10.0));
}

TEST_CASE("propagate_columns equals the exact exponential") {
  const ChainParams p{10, 0.5, 0.5};
  const ChainGenerator gen = ChainGenerator::build(p);
  const double mu = 0.04;
  for (double dt : {1e-3, 0.2, 3.0}) {
    const Eigen::MatrixXcd h = build_chain_bdg(p, mu).entries;
    const Eigen::MatrixXcd u = (std::complex<double>(0.0, -dt) * h).exp();
    const Eigen::MatrixXcd w0 = random_columns(20, 6, 5);
    Eigen::MatrixXcd w = w0;
    propagate_columns(w, gen, mu, dt);
    CHECK((w - u * w0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((exact_chain_propagator(build_chain_bdg(p, mu), dt) - u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  const ChainParams p{25, 0.5, 0.45};
  const ChainGenerator gen = ChainGenerator::build(p);
  Eigen::MatrixXcd a = random_columns(50, 25, 9);
  Eigen::MatrixXcd b = a;
  for (int s = 0; s < 20; ++s) {
    propagate_columns(a, gen, 0.001 * s, 0.3);
    propagate_columns_serial(b, gen, 0.001 * s, 0.3);
  }
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reference step preserves purity and agrees with the kernel") {
  const ChainParams p{6, 0.5, 0.5};
  const ModeBasis basis = tetron_mode_basis(p, 0.0);
  CorrelationMatrix g = rotate_to_site_basis(ground_state_qp_correlation(6, QubitState::plus), basis);
  const BdGMatrix h = build_tetron_bdg(p, 0.08);
  const double dt = 0.7;
  CorrelationMatrix ref = g;
  propagate_correlation_reference(ref, h, dt);
  const Eigen::MatrixXcd u = (std::complex<double>(0.0, -dt) * h.entries).exp();
  const Eigen::MatrixXcd expected = u.conjugate() * g.entries * u.transpose();
  CHECK((ref.entries - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(purity_defect(covariance_from_correlation(ref)) < 1e-10);
}
