#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spinsq/error.hpp"
#include "spinsq/ramsey.hpp"

using namespace spinsq;

namespace {

std::vector<dicke::DickeState> sample_states() {
  return {dicke::bloch_ground_state(10), dicke::psi_a_state(10, -1.0),
          dicke::psi_a_state(12, 0.4),
          dicke::DickeState::normalized(
              5, dicke::Vector::LinSpaced(6, 0.5, 2.0).cast<dicke::Complex>() *
                     dicke::Complex(0.6, 0.8))};
}

}  // namespace

TEST(Ramsey, UnitaryIsUnitary) {
  const auto u = ramsey::ramsey_unitary(7, 0.37);
  EXPECT_LT((u * u.adjoint() - dicke::Matrix::Identity(8, 8)).norm(), 1e-12);
}

TEST(Ramsey, ClosedFormsMatchConjugation) {
  for (const auto& s : sample_states()) {
    for (double phi = -3.0; phi <= 7.0; phi += 0.41) {
      EXPECT_NEAR(ramsey::ramsey_signal(s, phi), ramsey::ramsey_signal_conjugated(s, phi), 1e-10);
      EXPECT_NEAR(ramsey::ramsey_variance(s, phi), ramsey::ramsey_variance_rotated(s, phi), 1e-9);
    }
  }
}

TEST(Ramsey, SensitivityMatchesFiniteDifference) {
  for (const auto& s : sample_states()) {
    for (double phi = 0.1; phi < 6.2; phi += 0.7) {
      const double fd =
          oracle::derivative([&](double p) { return ramsey::ramsey_signal(s, p); }, phi);
      EXPECT_NEAR(ramsey::sensitivity(s, phi), fd, 1e-8);
    }
  }
}

TEST(Ramsey, Periodic) {
  const auto s = dicke::psi_a_state(10, 0.8);
  for (double phi : {0.0, 1.0, 2.5}) {
    EXPECT_NEAR(ramsey::ramsey_signal(s, phi + 2 * std::numbers::pi),
                ramsey::ramsey_signal(s, phi), 1e-11);
  }
}

TEST(Ramsey, StandardQuantumLimit) {
  const auto acc = ramsey::phase_accuracy(dicke::bloch_ground_state(100), std::numbers::pi / 2);
  ASSERT_TRUE(acc.valid);
  EXPECT_NEAR(acc.value, 0.1, 1e-12);
}

TEST(Ramsey, SqueezedAccuracyAtQuarterTurn) {
  // delta phi(pi/2) = Delta Jx / |<Jz>| from the closed-form moments.
  for (double a : {-1.0, -0.5, 2.0}) {
    const auto ref = oracle::psi_a_moments(100, a);
    const auto acc = ramsey::phase_accuracy(dicke::psi_a_state(100, a), std::numbers::pi / 2);
    EXPECT_NEAR(acc.value, std::sqrt(ref.var_x) / std::abs(ref.mean_z), 1e-12) << a;
  }
  EXPECT_NEAR(ramsey::phase_accuracy(dicke::psi_a_state(100, -1.0), std::numbers::pi / 2).value,
              1.0 / std::sqrt(2550.0), 1e-12);
}

TEST(Ramsey, SensitivityZeroIsFlagged) {
  const auto s = dicke::bloch_ground_state(10);
  const auto acc = ramsey::phase_accuracy(s, 0.0);
  EXPECT_FALSE(acc.valid);
  EXPECT_TRUE(std::isnan(acc.value));
  EXPECT_FALSE(acc.diagnostic.empty());
}

TEST(Ramsey, SweepShape) {
  std::vector<double> grid(401);
  for (int i = 0; i < 401; ++i) grid[i] = 2 * std::numbers::pi * i / 400;
  const auto rows = ramsey::ramsey_sweep(dicke::psi_a_state(100, -1.0), grid);
  ASSERT_EQ(rows.size(), 401u);
  int flagged = 0;
  for (const auto& r : rows) {
    EXPECT_GE(r.excited_fraction, -1e-12);
    EXPECT_LE(r.excited_fraction, 1 + 1e-12);
    if (r.flagged) {
      ++flagged;
      EXPECT_TRUE(std::isnan(r.delta_phi));
    } else {
      EXPECT_GT(r.delta_phi, 0.0);
    }
  }
  EXPECT_GE(flagged, 2);
  EXPECT_THROW(ramsey::ramsey_sweep(dicke::bloch_ground_state(2), {}), Error);
}

TEST(Ramsey, SmallALimit) {
  // delta phi(pi/2) -> 1/sqrt(2 J (J + 1)) as a -> 0+, close to sqrt(2)/N.
  const double j = 50.0;
  const double limit = 1.0 / std::sqrt(2.0 * j * (j + 1));
  const auto acc = ramsey::phase_accuracy(dicke::psi_a_state(100, 1e-6), std::numbers::pi / 2);
  EXPECT_NEAR(acc.value, limit, 1e-9);
  EXPECT_NEAR(acc.value, std::sqrt(2.0) / 100.0, 0.015 * std::sqrt(2.0) / 100.0);
}
