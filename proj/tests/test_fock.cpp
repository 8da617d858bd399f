#include <doctest.h>

#include <cmath>

#include "support/chain_oracle.hpp"
#include "tleak/dynamics.hpp"
#include "tleak/errors.hpp"
#include "tleak/fock.hpp"

using namespace tleak;

namespace {

double max_diff(const LeakageRecord& a, const LeakageRecord& b) {
  return std::max({std::abs(a.l_odd - b.l_odd), std::abs(a.l_even - b.l_even), std::abs(a.l_g - b.l_g)});
}

double max_diff(const LeakageRecord& a, const oracle::Leakage& b) {
  return std::max({std::abs(a.l_odd - b.l_odd), std::abs(a.l_even - b.l_even), std::abs(a.l_g - b.l_g)});
}

}  // namespace

TEST_CASE("FockSpace operators") {
  const FockSpace fs(2);
  CHECK(fs.dim() == 16);
  // Canonical anticommutation relations.
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Eigen::MatrixXd& ca = fs.annihilator(a);
      const Eigen::MatrixXd& cb = fs.annihilator(b);
      const Eigen::MatrixXd acomm = ca * cb.transpose() + cb.transpose() * ca;
      const Eigen::MatrixXd expected = (a == b ? 1.0 : 0.0) * Eigen::MatrixXd::Identity(16, 16);
      CHECK((acomm - expected).cwiseAbs().maxCoeff() == 0.0);
      CHECK((ca * cb + cb * ca).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  CHECK_THROWS_AS(FockSpace(4), InvalidParameter);
}

TEST_CASE("qp vacuum and pair state are ground states with the expected parity") {
  const ChainParams p{3, 0.5, 0.5};
  const FockSpace fs(3);
  const ModeBasis basis = tetron_mode_basis(p, 0.05);
  const Eigen::VectorXcd vac = fs.qp_vacuum(basis);
  const Eigen::VectorXcd one = fs.qp_pair_state(basis, vac);
  CHECK(vac.norm() == doctest::Approx(1.0));
  CHECK(one.norm() == doctest::Approx(1.0));
  CHECK(std::abs(vac.dot(one)) < 1e-12);
  const Eigen::MatrixXd h = fs.hamiltonian(p, 0.05);
  const double e_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues()(0);
  CHECK(std::real(vac.dot(h.cast<std::complex<double>>() * vac)) - e_min < 1e-3);
  const Eigen::MatrixXcd parity = fs.mzm_parity(basis);
  CHECK(std::real(vac.dot(parity * vac)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::real(one.dot(parity * one)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("library oracle matches the independent chain-sector oracle") {
  for (int n : {2, 3}) {
    for (double mu : {0.03, 0.1}) {
      const auto lib = fock_oracle_quench({n, 0.5, 0.5}, 0.0, mu).records.back();
      const auto ind = oracle::tetron_leakage(n, 0.0, mu, 0.0, 0);
      CHECK(max_diff(lib, ind) < 1e-12);
    }
  }
}

TEST_CASE("sudden quench: covariance method equals both oracles") {
  for (int n : {2, 3}) {
    for (double mu : {0.03, 0.1}) {
      const ChainParams p{n, 0.5, 0.5};
      const LeakageRecord cov = sudden_quench(p, 0.0, mu);
      CHECK(max_diff(cov, fock_oracle_quench(p, 0.0, mu).records.back()) < 1e-8);
      CHECK(max_diff(cov, oracle::tetron_leakage(n, 0.0, mu, 0.0, 0)) < 1e-8);
    }
  }
}

TEST_CASE("ramp: covariance method equals both oracles") {
  for (int n : {2, 3}) {
    for (double v : {1e-2, 1e-1}) {
      const ChainParams p{n, 0.5, 0.5};
      const RampProtocol r{0.0, 0.1, v};
      SteppingPolicy policy;
      policy.max_dmu_per_step = 0.1 / 400;
      const auto cov = evolve_ramp(p, r, policy);
      const auto fock = fock_oracle_ramp(p, r, policy);
      REQUIRE(cov.size() == fock.records.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < cov.size(); ++i) worst = std::max(worst, max_diff(cov[i], fock.records[i]));
      CHECK(worst < 1e-6);
      for (double x : fock.norm) CHECK(x == doctest::Approx(1.0).epsilon(1e-10));
      for (double x : fock.total_parity) CHECK(x == doctest::Approx(fock.total_parity.front()).epsilon(1e-10));
      const int steps = make_step_grid(r, policy).steps;
      CHECK(max_diff(cov.back(), oracle::tetron_leakage(n, 0.0, 0.1, v, steps)) < 1e-8);
    }
  }
}

TEST_CASE("oracle norm is conserved at fixed mu") {
  const ChainParams p{2, 0.5, 0.5};
  const RampProtocol r{0.05, 0.05 + 1e-9, 1e-9};
  SteppingPolicy policy;
  const auto fock = fock_oracle_ramp(p, r, policy, {0.0, 0.3, 0.9});
  for (double x : fock.norm) CHECK(x == doctest::Approx(1.0).epsilon(1e-10));
}
