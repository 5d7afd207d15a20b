#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "spinsq/error.hpp"
#include "spinsq/ode.hpp"

using namespace spinsq;
using Scalar = Eigen::Matrix<double, 1, 1>;

TEST(Ode, ExponentialDecay) {
  const std::vector<double> times{0.0, 0.5, 1.0, 3.0};
  std::vector<double> got;
  ode::integrate<Scalar>([](double, const Scalar& y) -> Scalar { return -2.0 * y; },
                         Scalar::Constant(1.0), times, {},
                         [&](double, const Scalar& y) { got.push_back(y(0)); });
  ASSERT_EQ(got.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_NEAR(got[i], std::exp(-2.0 * times[i]), 1e-8);
  }
}

TEST(Ode, OscillatorConservesEnergy) {
  std::vector<double> times(101);
  for (int i = 0; i <= 100; ++i) times[i] = 0.2 * i;
  double worst = 0;
  const auto stats = ode::integrate<Eigen::Vector2d>(
      [](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(y(1), -y(0)); },
      Eigen::Vector2d(1.0, 0.0), times, {},
      [&](double t, const Eigen::Vector2d& y) {
        worst = std::max(worst, std::abs(y(0) - std::cos(t)));
      });
  EXPECT_LT(worst, 1e-6);
  EXPECT_GT(stats.accepted, 0u);
}

TEST(Ode, RejectsUnsortedTimes) {
  const std::vector<double> times{0.0, 1.0, 0.5};
  EXPECT_THROW(ode::integrate<Scalar>([](double, const Scalar& y) -> Scalar { return y; },
                                      Scalar::Constant(1.0), times, {},
                                      [](double, const Scalar&) {}),
               Error);
}

TEST(Ode, StepBudgetIsEnforced) {
  ode::Tolerance tol;
  tol.max_steps = 10;
  const std::vector<double> times{0.0, 100.0};
  try {
    ode::integrate<Scalar>(
        [](double t, const Scalar&) -> Scalar { return Scalar::Constant(std::cos(50 * t)); },
        Scalar::Constant(0.0), times, tol, [](double, const Scalar&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Integrator);
  }
}
