#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinsq/error.hpp"
#include "spinsq/twist.hpp"

using namespace spinsq;

namespace {

std::vector<double> grid(double t_max, int points) {
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = t_max * i / (points - 1);
  return t;
}

}  // namespace

TEST(FockBasis, OrderingByTotalThenN1) {
  const twist::FockBasis b(4);
  EXPECT_EQ(b.size(), 15u);
  for (int tot = 0; tot <= 4; ++tot) {
    for (int n1 = 0; n1 <= tot; ++n1) {
      const auto i = b.index(n1, tot - n1);
      EXPECT_EQ(i, static_cast<std::size_t>(tot * (tot + 1) / 2 + n1));
      EXPECT_EQ(b.state(i), std::make_pair(n1, tot - n1));
    }
  }
}

TEST(Unitary, MatchesNumberBasisOracle) {
  for (int n : {2, 4, 10}) {
    const auto t = grid(3.0 / n, 31);
    const auto got = twist::evolve_unitary(n, 1.0, t);
    const auto ref = oracle::counter_twist_fock(n, 1.0, t);
    ASSERT_EQ(got.rows.size(), ref.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_NEAR(got.rows[i].dxx, ref[i].dxx, 1e-9 * n) << n << " " << i;
      EXPECT_NEAR(got.rows[i].dyy, ref[i].dyy, 1e-9 * n);
      EXPECT_NEAR(got.rows[i].lz, ref[i].lz, 1e-10 * n);
      EXPECT_NEAR(got.rows[i].lx, ref[i].lx, 1e-10 * n);
    }
  }
}

TEST(Unitary, ConservesCasimirAndNumber) {
  const auto traj = twist::evolve_unitary(16, 0.5, grid(0.4, 21));
  for (const auto& r : traj.rows) {
    EXPECT_NEAR(r.l0, 16.0, 1e-12);
    EXPECT_NEAR(r.casimir, 8.0 * 9.0, 1e-9);
  }
  EXPECT_NEAR(traj.rows.front().dxx, 8.0, 1e-12);
  EXPECT_NEAR(traj.rows.front().dyy, 8.0, 1e-12);
}

TEST(Master, LosslessMatchesUnitary) {
  const auto t = grid(0.3, 16);
  const auto run = twist::evolve_master({6, 1.0, 0.0, 0.0}, t);
  const auto ref = twist::evolve_unitary(6, 1.0, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(run.trajectory.rows[i].dxx, ref.rows[i].dxx, 1e-6);
    EXPECT_NEAR(run.trajectory.rows[i].lz, ref.rows[i].lz, 1e-6);
  }
  EXPECT_LT(run.diagnostics.max_trace_drift, 1e-8);
}

TEST(Master, SymmetricLossDecaysNumberExactly) {
  const double gamma = 0.4;
  const auto t = grid(1.0, 11);
  const auto run = twist::evolve_master({8, 1.0, gamma, gamma}, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(run.trajectory.rows[i].l0, 8.0 * std::exp(-2 * gamma * t[i]), 1e-6);
  }
  EXPECT_NEAR(run.final_state.trace(), 1.0, 1e-8);
  EXPECT_LT(run.final_state.hermiticity_error(), 1e-10);
  EXPECT_GT(run.final_state.min_eigenvalue(), -1e-8);
}

TEST(Master, AsymmetricLossSingleModeDecay) {
  // chi = 0: each mode decays on its own.
  const auto t = grid(1.0, 6);
  const auto run = twist::evolve_master({4, 0.0, 0.3, 0.1}, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double n1 = 4.0 * std::exp(-0.6 * t[i]);
    EXPECT_NEAR(run.trajectory.rows[i].l0, n1, 1e-6);
    EXPECT_NEAR(run.trajectory.rows[i].lz, -0.5 * n1, 1e-6);
  }
}

TEST(Master, RejectsLargeSystems) {
  try {
    twist::evolve_master({twist::kMaxMasterAtoms + 2, 1.0, 0.0, 0.0}, grid(0.1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resource);
  }
  EXPECT_THROW(twist::evolve_master({4, 1.0, -0.1, 0.0}, grid(0.1, 2)), Error);
}

TEST(MinVariance, ParabolicVertex) {
  twist::MomentTrajectory traj;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.1 * i;
    traj.rows.push_back({t, 10.0, 0, 3.0 + 2.0 * (t - 1.23) * (t - 1.23), 0, 0, 0, 0});
  }
  const auto m = twist::find_min_variance(traj);
  EXPECT_NEAR(m.t_star, 1.23, 1e-12);
  EXPECT_NEAR(m.delta_xx_min, 0.3, 1e-12);
  EXPECT_EQ(m.index, 12u);

  twist::MomentTrajectory falling;
  for (int i = 0; i < 5; ++i) falling.rows.push_back({double(i), 1, 0, 5.0 - i, 0, 0, 0, 0});
  try {
    twist::find_min_variance(falling);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoInteriorMinimum);
  }
}

TEST(Unitary, FiniteSizeMinimumExists) {
  const int n = 20;
  const auto traj = twist::evolve_unitary(n, 1.0, grid(4.0 / n, 401));
  const auto m = twist::find_min_variance(traj);
  EXPECT_GT(m.t_star * n, 1.0);
  EXPECT_LT(m.delta_xx_min, 0.5);
}
