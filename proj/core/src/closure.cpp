#include "spinsq/closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "spinsq/error.hpp"

namespace spinsq::closure {

namespace {

using Vec4 = Eigen::Vector4d;

Vec4 pack(const ContractedState& s) { return {s.h0, s.hz, s.dxx, s.dyy}; }
ContractedState unpack_h(const Vec4& v) { return {v(0), v(1), v(2), v(3)}; }
Vec4 pack(const LState& s) { return {s.l0, s.lz, s.dxx, s.dyy}; }
LState unpack_l(const Vec4& v) { return {v(0), v(1), v(2), v(3)}; }

void check_state(double tau, const ContractedState& s) {
  if (s.h0 < -1e-12 || s.h0 > 1.0 + 1e-9 || s.dxx < 0.0 || s.dyy < 0.0 ||
      !std::isfinite(s.hz)) {
    std::ostringstream msg;
    msg << "closure state invalid at tau=" << tau << " (h0=" << s.h0
        << ", dxx=" << s.dxx << ", dyy=" << s.dyy << ")";
    fail(ErrorKind::Validity, msg.str());
  }
}

void check_grid(std::span<const double> taus) {
  require(!taus.empty(), "tau grid is empty");
  require(taus.front() == 0.0, "tau grid must start at 0");
  for (std::size_t i = 1; i < taus.size(); ++i) {
    require(taus[i] >= taus[i - 1], "tau grid must be sorted");
  }
}

double dxx_at(const ClosureConfig& config, double tau) {
  const double grid[] = {0.0, tau};
  return integrate_closure(config, grid).rows.back().state.dxx;
}

}  // namespace

void ClosureConfig::validate() const {
  require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon <= 1.0,
          "epsilon must lie in [0, 1]");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
}

LState derivs_L(const LState& s, double chi, double gamma) {
  LState d;
  d.l0 = -2.0 * gamma * s.l0;
  d.lz = -2.0 * gamma * s.lz - chi * (s.dxx - s.dyy);
  d.dxx = -4.0 * gamma * s.dxx + gamma * s.l0 + 4.0 * chi * s.lz * s.dxx;
  d.dyy = -4.0 * gamma * s.dyy + gamma * s.l0 - 4.0 * chi * s.lz * s.dyy;
  return d;
}

ContractedState derivs_h(const ContractedState& s, const ClosureConfig& c) {
  ContractedState d;
  d.h0 = -2.0 * c.kappa * s.h0;
  d.hz = -2.0 * c.kappa * s.hz - (s.dxx - s.dyy);
  d.dxx = -4.0 * c.kappa * s.dxx + c.kappa * s.h0 - 2.0 * s.h0 * s.dxx +
          4.0 * c.epsilon * s.hz * s.dxx;
  d.dyy = -4.0 * c.kappa * s.dyy + c.kappa * s.h0 + 2.0 * s.h0 * s.dyy -
          4.0 * c.epsilon * s.hz * s.dyy;
  return d;
}

ContractedState to_contracted(const LState& s, double atoms) {
  require(atoms > 0, "atom number must be positive");
  return {s.l0 / atoms, s.lz + 0.5 * s.l0, s.dxx / atoms, s.dyy / atoms};
}

LState from_contracted(const ContractedState& s, double atoms) {
  require(atoms > 0, "atom number must be positive");
  const double l0 = s.h0 * atoms;
  return {l0, s.hz - 0.5 * l0, s.dxx * atoms, s.dyy * atoms};
}

ContractedState initial_contracted() { return {1.0, 0.0, 0.5, 0.5}; }

std::vector<double> ClosureTrajectory::dxx() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.state.dxx);
  return out;
}

ClosureTrajectory integrate_closure(const ClosureConfig& config,
                                    std::span<const double> taus,
                                    const ode::Tolerance& tolerance) {
  config.validate();
  check_grid(taus);

  ClosureTrajectory traj;
  traj.rows.reserve(taus.size());

  if (config.representation == Representation::H) {
    auto rhs = [&](double, const Vec4& y) { return pack(derivs_h(unpack_h(y), config)); };
    auto observe = [&](double tau, const Vec4& y) {
      const ContractedState s = unpack_h(y);
      check_state(tau, s);
      traj.rows.push_back({tau, s});
    };
    traj.stats = ode::integrate<Vec4>(rhs, pack(initial_contracted()), taus, tolerance,
                                      observe);
    return traj;
  }

  require(config.epsilon > 0.0, "the L representation needs epsilon > 0");
  const double atoms = 1.0 / config.epsilon;
  const double chi = 1.0;
  const double gamma = config.kappa * atoms * chi;
  std::vector<double> times(taus.begin(), taus.end());
  for (double& t : times) t /= atoms * chi;

  // Absolute tolerance scales with the variables, which are N times larger.
  ode::Tolerance scaled = tolerance;
  scaled.abs *= atoms;
  scaled.min_step /= atoms;
  auto rhs = [&](double, const Vec4& y) { return pack(derivs_L(unpack_l(y), chi, gamma)); };
  auto observe = [&](double t, const Vec4& y) {
    const ContractedState s = to_contracted(unpack_l(y), atoms);
    const double tau = t * atoms * chi;
    check_state(tau, s);
    traj.rows.push_back({tau, s});
  };
  traj.stats = ode::integrate<Vec4>(rhs, pack(from_contracted(initial_contracted(), atoms)),
                                    times, scaled, observe);
  return traj;
}

AnalyticEstimate analytic_variance(const ClosureConfig& config, double tau,
                                   bool include_growth) {
  config.validate();
  require(std::isfinite(tau) && tau >= 0.0, "tau must be >= 0");
  AnalyticEstimate out;
  out.value = 0.5 * (std::exp(-2.0 * tau) + config.kappa + 0.5 * config.epsilon);
  const double scale = std::max(config.kappa, config.epsilon);
  if (include_growth) {
    out.value += 0.5 * scale * scale * std::exp(2.0 * tau);
    out.heuristic = true;
    out.warnings.push_back("growth term coefficient max(kappa, epsilon)^2 is heuristic");
  }
  if (config.kappa > 0.1) out.warnings.push_back("kappa > 0.1: outside perturbative range");
  if (config.epsilon > 0.1) {
    out.warnings.push_back("epsilon > 0.1: outside perturbative range");
  }
  if (scale > 0.0 && std::exp(-tau) < scale) {
    out.warnings.push_back("tau beyond the squeezing minimum: omitted terms dominate");
  }
  return out;
}

ClosureMinimum find_closure_minimum(const ClosureConfig& config, double tau_max) {
  config.validate();
  require(std::isfinite(tau_max) && tau_max > 0.0, "tau_max must be > 0");

  constexpr int kCoarse = 400;
  std::vector<double> grid(kCoarse + 1);
  for (int i = 0; i <= kCoarse; ++i) grid[i] = tau_max * i / kCoarse;
  const ClosureTrajectory coarse = integrate_closure(config, grid);
  const std::vector<double> values = coarse.dxx();
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  if (best == 0 || best == values.size() - 1) {
    fail(ErrorKind::NoInteriorMinimum,
         "delta_xx has no interior minimum on [0, " + std::to_string(tau_max) + "]");
  }

  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = grid[best - 1];
  double hi = grid[best + 1];
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = dxx_at(config, x1);
  double f2 = dxx_at(config, x2);
  while (hi - lo > 1e-7 * std::max(1.0, hi)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = dxx_at(config, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = dxx_at(config, x2);
    }
  }

  ClosureMinimum out;
  out.tau_star = 0.5 * (lo + hi);
  out.dxx_min = dxx_at(config, out.tau_star);
  const double scale = std::max(config.kappa, config.epsilon);
  out.tau_estimate = scale > 0.0 ? -std::log(scale) : std::numeric_limits<double>::infinity();
  return out;
}

ScalingEstimate squeezing_scalings(double s, double atoms, double chi, double gamma) {
  require(std::isfinite(atoms) && atoms >= 1.0, "atom number must be >= 1");
  require(std::isfinite(s) && s >= 1.0 && s <= atoms, "squeezing factor must lie in [1, N]");
  require(std::isfinite(chi) && chi > 0.0, "chi must be > 0");
  require(std::isfinite(gamma) && gamma >= 0.0, "Gamma must be >= 0");
  ScalingEstimate out;
  out.feasible = atoms * chi > s * gamma;
  out.time = std::log(s) / (atoms * chi);
  out.atom_loss = atoms / s * std::log(s);
  out.target_dxx = 1.0 / s;
  return out;
}

}  // namespace spinsq::closure
