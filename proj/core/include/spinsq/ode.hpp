#pragma once

// Adaptive Dormand-Prince 5(4) integrator shared by the exact master
// equation, the moment closures and the covariance equations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>

#include "spinsq/error.hpp"

namespace spinsq::ode {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  double min_step = 1e-14;
  std::size_t max_steps = 5'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double last_step = 0.0;
};

namespace detail {

template <class State>
double scaled_max(const State& err, const State& y0, const State& y1,
                  const Tolerance& tol) {
  const auto scale =
      (tol.abs + tol.rel * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

template <class State>
bool all_finite(const State& y) {
  return y.allFinite();
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from times.front() and calls
/// observe(t, y) at every entry of `times` (including the first). Steps are
/// clamped so each output time is hit exactly; no interpolation.
///
/// `State` is any Eigen dense type (vector or matrix, real or complex).
template <class State, class Rhs, class Observer>
Stats integrate(Rhs&& rhs, State y, std::span<const double> times,
                const Tolerance& tol, Observer&& observe) {
  Stats stats;
  if (times.empty()) return stats;
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(times[i] >= times[i - 1], "ode: output times must be sorted");
  }

  double t = times.front();
  observe(t, static_cast<const State&>(y));
  if (times.size() == 1) return stats;

  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  State k1 = rhs(t, static_cast<const State&>(y));
  ++stats.rhs_evals;

  const double span = times.back() - times.front();
  double h;
  {
    // Hairer's starting-step heuristic, first-order variant.
    const State zero = State::Zero(y.rows(), y.cols());
    const double d0 = detail::scaled_max(y, y, zero, tol);
    const double d1 = detail::scaled_max(k1, y, zero, tol);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span > 0 ? span : 1.0);
  }

  for (std::size_t out = 1; out < times.size(); ++out) {
    const double t_target = times[out];
    while (t < t_target) {
      if (stats.accepted + stats.rejected >= tol.max_steps) {
        std::ostringstream msg;
        msg << "ode: step budget exhausted at t=" << t << " (h=" << h
            << ", accepted=" << stats.accepted
            << ", rejected=" << stats.rejected << ")";
        fail(ErrorKind::Integrator, msg.str());
      }
      const double remaining = t_target - t;
      const bool last = h >= remaining;
      const double step = last ? remaining : h;

      const State k2 = rhs(t + c2 * step, State(y + step * (a21 * k1)));
      const State k3 = rhs(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
      const State k4 =
          rhs(t + c4 * step,
              State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 = rhs(t + c5 * step, State(y + step * (a51 * k1 + a52 * k2 +
                                                            a53 * k3 + a54 * k4)));
      const State k6 =
          rhs(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 +
                                          a64 * k4 + a65 * k5)));
      State y_new =
          y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = rhs(t + step, static_cast<const State&>(y_new));
      stats.rhs_evals += 6;

      const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                e6 * k6 + e7 * k7);
      double err_norm = detail::scaled_max(err, y, y_new, tol);
      if (!std::isfinite(err_norm) || !detail::all_finite(y_new)) {
        err_norm = 1e10;
      }

      if (err_norm <= 1.0) {
        t = last ? t_target : t + step;
        y = std::move(y_new);
        k1 = k7;
        ++stats.accepted;
        stats.last_step = step;
        const double factor =
            err_norm == 0.0 ? 5.0
                            : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        // A step shortened to land on an output time says little about the
        // achievable step size, so it may only grow h.
        h = (last && step < h) ? std::max(h, step * factor) : step * factor;
      } else {
        ++stats.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        if (h < tol.min_step * std::max(1.0, std::abs(t))) {
          std::ostringstream msg;
          msg << "ode: step size underflow at t=" << t << " (h=" << h
              << ", error norm=" << err_norm << ", accepted="
              << stats.accepted << ", rejected=" << stats.rejected << ")";
          fail(ErrorKind::Integrator, msg.str());
        }
      }
    }
    observe(t, static_cast<const State&>(y));
  }
  return stats;
}

}  // namespace spinsq::ode
