#include <gtest/gtest.h>

#include <cmath>

#include "spinsq/closure.hpp"
#include "spinsq/error.hpp"

using namespace spinsq;
using closure::ClosureConfig;
using closure::Representation;

namespace {

std::vector<double> grid(double tau_max, int points) {
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = tau_max * i / (points - 1);
  return t;
}

}  // namespace

TEST(Closure, ContractedFormIsChainRuleOfRawForm) {
  const double n = 12, chi = 0.7, gamma = 0.3;
  const closure::LState s{9.5, -3.1, 2.2, 7.4};
  const auto dl = closure::derivs_L(s, chi, gamma);
  const ClosureConfig cfg{1.0 / n, gamma / (n * chi), Representation::H};
  const auto dh = closure::derivs_h(closure::to_contracted(s, n), cfg);
  const double dtau = n * chi;  // dtau/dt
  EXPECT_NEAR(dh.h0, dl.l0 / n / dtau, 1e-12);
  EXPECT_NEAR(dh.hz, (dl.lz + 0.5 * dl.l0) / dtau, 1e-12);
  EXPECT_NEAR(dh.dxx, dl.dxx / n / dtau, 1e-12);
  EXPECT_NEAR(dh.dyy, dl.dyy / n / dtau, 1e-12);
}

TEST(Closure, ConversionRoundTrip) {
  const closure::LState s{11.0, -4.0, 3.0, 8.0};
  const auto back = closure::from_contracted(closure::to_contracted(s, 12), 12);
  EXPECT_NEAR(back.l0, s.l0, 1e-12);
  EXPECT_NEAR(back.lz, s.lz, 1e-12);
  EXPECT_NEAR(back.dxx, s.dxx, 1e-12);
  EXPECT_NEAR(back.dyy, s.dyy, 1e-12);
  const auto init = closure::initial_contracted();
  EXPECT_EQ(init.h0, 1.0);
  EXPECT_EQ(init.hz, 0.0);
  EXPECT_EQ(init.dxx, 0.5);
  EXPECT_EQ(init.dyy, 0.5);
}

TEST(Closure, BosonicLosslessIsExponential) {
  const auto taus = grid(3.0, 61);
  const auto traj = closure::integrate_closure({0.0, 0.0, Representation::H}, taus);
  for (const auto& r : traj.rows) {
    EXPECT_NEAR(r.state.dxx, 0.5 * std::exp(-2 * r.tau), 1e-8);
    EXPECT_NEAR(r.state.dyy, 0.5 * std::exp(2 * r.tau), 1e-8 * std::exp(2 * r.tau));
  }
}

TEST(Closure, RepresentationsAgree) {
  const auto taus = grid(3.0, 31);
  for (double kappa : {0.0, 0.05}) {
    const auto h = closure::integrate_closure({1.0 / 12, kappa, Representation::H}, taus);
    const auto l = closure::integrate_closure({1.0 / 12, kappa, Representation::L}, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      EXPECT_NEAR(h.rows[i].state.dxx, l.rows[i].state.dxx, 1e-8);
      EXPECT_NEAR(h.rows[i].state.h0, l.rows[i].state.h0, 1e-9);
    }
  }
  EXPECT_THROW(closure::integrate_closure({0.0, 0.0, Representation::L}, taus), Error);
}

TEST(Closure, NumberDecayIsExact) {
  const auto taus = grid(2.0, 5);
  const auto traj = closure::integrate_closure({0.1, 0.2, Representation::H}, taus);
  for (const auto& r : traj.rows) EXPECT_NEAR(r.state.h0, std::exp(-0.4 * r.tau), 1e-10);
}

TEST(Closure, PerturbativeEstimateAtEarlyTimes) {
  // Small kappa, epsilon: numerics and the leading-order estimate agree while
  // the growth term is negligible.
  const ClosureConfig cfg{1e-4, 1e-4, Representation::H};
  const auto taus = grid(2.0, 21);
  const auto traj = closure::integrate_closure(cfg, taus);
  for (const auto& r : traj.rows) {
    const double est = closure::analytic_variance(cfg, r.tau).value;
    EXPECT_NEAR(r.state.dxx, est, 0.02 * est) << r.tau;
  }
  const auto heur = closure::analytic_variance({0.2, 0.2, Representation::H}, 3.0, true);
  EXPECT_TRUE(heur.heuristic);
  EXPECT_FALSE(heur.warnings.empty());
}

TEST(Closure, MinimumIsInteriorAndConsistent) {
  const ClosureConfig cfg{1.0 / 12, 0.1, Representation::H};
  const auto m = closure::find_closure_minimum(cfg, 6.0);
  EXPECT_GT(m.tau_star, 0.5);
  EXPECT_LT(m.tau_star, 4.0);
  const auto traj = closure::integrate_closure(cfg, grid(6.0, 601));
  for (const auto& r : traj.rows) EXPECT_GE(r.state.dxx, m.dxx_min - 1e-9);
  EXPECT_NEAR(m.tau_estimate, -std::log(0.1), 1e-12);

  try {
    closure::find_closure_minimum({0.0, 0.0, Representation::H}, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoInteriorMinimum);
  }
}

TEST(Closure, Scalings) {
  const auto s = closure::squeezing_scalings(10.0, 1000.0, 1.0, 5.0);
  EXPECT_TRUE(s.feasible);
  EXPECT_NEAR(s.time, std::log(10.0) / 1000.0, 1e-15);
  EXPECT_NEAR(s.atom_loss, 100.0 * std::log(10.0), 1e-12);
  EXPECT_NEAR(s.target_dxx, 0.1, 1e-15);
  EXPECT_FALSE(closure::squeezing_scalings(10.0, 1000.0, 1.0, 200.0).feasible);
  EXPECT_THROW(closure::squeezing_scalings(0.5, 1000.0, 1.0, 5.0), Error);
}

TEST(Closure, ConfigValidation) {
  EXPECT_THROW((ClosureConfig{1.5, 0.0, Representation::H}.validate()), Error);
  EXPECT_THROW((ClosureConfig{0.1, -1.0, Representation::H}.validate()), Error);
  EXPECT_NO_THROW((ClosureConfig{0.0, 0.0, Representation::H}.validate()));
}
