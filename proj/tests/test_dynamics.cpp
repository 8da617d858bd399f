#include <doctest.h>

#include <cmath>

#include "tleak/analytics.hpp"
#include "tleak/dynamics.hpp"
#include "tleak/errors.hpp"

using namespace tleak;

namespace {

void check_record(const LeakageRecord& r) {
  CHECK(std::abs(r.l_g - r.l_odd - r.l_even) < 1e-10);
  for (double x : {r.l_odd, r.l_even, r.l_g}) {
    CHECK(x >= -1e-9);
    CHECK(x <= 1.0 + 1e-9);
  }
}

}  // namespace

TEST_CASE("stepping policy") {
  SteppingPolicy p;
  CHECK_NOTHROW(p.validate());
  p.max_dmu_per_step = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p.max_dmu_per_step = 0.0;
  p.purity_tol = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  CHECK(SteppingPolicy{}.resolved_dmu({0.0, 0.03, 1e-3}) == doctest::Approx(0.03 / 2000));
}

TEST_CASE("step grid") {
  SteppingPolicy p;
  p.max_dmu_per_step = 0.007;
  const RampProtocol r{0.0, 0.03, 0.01};
  const StepGrid g = make_step_grid(r, p);
  CHECK(g.steps == 5);
  CHECK(g.dt * g.steps == doctest::Approx(3.0));
  CHECK(g.step_end(g.steps - 1) == doctest::Approx(3.0));
  const StepGrid fine = make_step_grid(r, p, 2);
  CHECK(fine.steps == 10);
  p.final_time_snap = false;
  const StepGrid raw = make_step_grid(r, p);
  CHECK(raw.dt == doctest::Approx(0.7));
  CHECK(raw.step_end(raw.steps - 1) == doctest::Approx(3.0));
}

TEST_CASE("run_schedule visits every sample once, in order") {
  SteppingPolicy p;
  p.max_dmu_per_step = 0.01;
  const RampProtocol r{0.0, 0.03, 0.01};
  const StepGrid g = make_step_grid(r, p);
  std::vector<double> mus, dts, ts;
  run_schedule(g, r, {0.0, 0.5, 1.0, 3.0},
               [&](double mu, double dt) {
                 mus.push_back(mu);
                 dts.push_back(dt);
               },
               [&](std::size_t, double t) { ts.push_back(t); });
  CHECK(ts == std::vector<double>{0.0, 0.5, 1.0, 3.0});
  double total = 0.0;
  for (double d : dts) total += d;
  CHECK(total == doctest::Approx(3.0));
  // The split pieces of the first step keep the left-endpoint mu.
  CHECK(mus.front() == 0.0);
  CHECK(mus[1] == 0.0);
  CHECK(default_sample_times(2.0, 3) == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("evolve_ramp basics") {
  const ChainParams p{10, 0.5, 0.5};
  const RampProtocol r{0.0, 0.03, 1e-2};
  const auto records = evolve_ramp(p, r, {});
  REQUIRE(records.size() == 202);
  CHECK(records.front().t == 0.0);
  CHECK(std::abs(records.front().l_odd) < 1e-12);
  CHECK(std::abs(records.front().l_even) < 1e-12);
  CHECK(records.front().parity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(records.back().t == doctest::Approx(3.0));
  CHECK(records.back().mu == 0.03);
  for (const auto& rec : records) {
    check_record(rec);
    CHECK(rec.purity_defect < 1e-6);
    CHECK(rec.parity == doctest::Approx(1.0 - 2.0 * rec.l_odd).epsilon(1e-12));
  }
  CHECK_THROWS_AS(evolve_ramp(p, {0.0, 1.5, 1e-2}, {}), InvalidParameter);
  CHECK_THROWS_AS(evolve_ramp(p, r, {}, {5.0}), InvalidParameter);
}

TEST_CASE("kernel and reference propagators agree") {
  const ChainParams p{8, 0.5, 0.5};
  const RampProtocol r{0.0, 0.1, 2e-2};
  SteppingPolicy k;
  k.max_dmu_per_step = 0.1 / 300;
  SteppingPolicy ref = k;
  ref.propagator = Propagator::reference;
  const auto a = evolve_ramp(p, r, k);
  const auto b = evolve_ramp(p, r, ref);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].l_odd - b[i].l_odd) < 1e-10);
    CHECK(std::abs(a[i].l_even - b[i].l_even) < 1e-10);
  }
}

TEST_CASE("slow ramps approach the adiabatic limit") {
  const ChainParams p{10, 0.5, 0.5};
  const RampProtocol r{0.0, 0.03, 1e-5};
  SteppingPolicy policy;
  policy.max_dmu_per_step = 0.03 / 300;
  const auto rec = evolve_ramp(p, r, policy, {r.duration()}).back();
  check_record(rec);
  CHECK(rec.l_g < 1e-4);
}

TEST_CASE("second-order convergence and richardson extrapolation") {
  const ChainParams p{12, 0.5, 0.5};
  const RampProtocol r{0.0, 0.05, 5e-3};
  auto final_lg = [&](int steps, bool richardson) {
    SteppingPolicy policy;
    policy.max_dmu_per_step = 0.05 / steps;
    policy.richardson = richardson;
    return evolve_ramp(p, r, policy, {r.duration()}).back().l_g;
  };
  const double a = final_lg(500, false), b = final_lg(1000, false), c = final_lg(2000, false);
  CHECK((a - b) / (b - c) == doctest::Approx(4.0).epsilon(0.02));
  const double ra = final_lg(1000, true);
  const double rb = final_lg(2000, true);
  CHECK(std::abs(ra - rb) / rb < 1e-6);
  CHECK(std::abs(rb - c) < std::abs(b - c));
}

TEST_CASE("ramp to mu=0.03 at v=2e-2, N=40") {
  const ChainParams p{40, 0.5, 0.5};
  const RampProtocol r{0.0, 0.03, 2e-2};
  SteppingPolicy policy;
  policy.richardson = true;
  const auto rec = evolve_ramp(p, r, policy, {r.duration()}).back();
  check_record(rec);
  // Expected magnitudes: L_even of a few 1e-3, L_odd below 1e-3.
  CHECK(rec.l_even > 1e-3);
  CHECK(rec.l_even < 5e-3);
  CHECK(rec.l_odd > 1e-4);
  CHECK(rec.l_odd < 1e-3);
  CHECK(rec.l_even > rec.l_odd);
}

TEST_CASE("sudden_quench") {
  const ChainParams p{40, 0.5, 0.5};
  const LeakageRecord same = sudden_quench(p, 0.03, 0.03);
  CHECK(std::abs(same.l_g) < 1e-12);
  CHECK(std::abs(same.l_odd) < 1e-12);
  const LeakageRecord q = sudden_quench(p, 0.0, 0.03);
  check_record(q);
  CHECK(q.l_even == doctest::Approx(4.275e-3).epsilon(0.1));
  const double odd = sudden_odd_prediction(tetron_mode_basis(p, 0.0), tetron_mode_basis(p, 0.03));
  CHECK(q.l_odd == doctest::Approx(odd).epsilon(0.01));
  CHECK(q.parity == doctest::Approx(1.0 - 2.0 * q.l_odd).epsilon(1e-12));
  CHECK_THROWS_AS(sudden_quench(p, 0.0, 1.2), InvalidParameter);
}
