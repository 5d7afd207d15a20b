#pragma once

// Second-order moment closure for counter-twisting with symmetric loss.
//
// Raw variables (l0, lz, Dxx, Dyy) evolve in t with parameters (chi, Gamma).
// Contracted variables use
//   h0 = l0 / N,  hz = lz + l0 / 2,  delta_ij = D_ij / N,
//   tau = N chi t,  kappa = Gamma / (N chi),  epsilon = 1 / N,
// and evolve in tau. epsilon = 0 is the bosonic limit.

#include <span>
#include <string>
#include <vector>

#include "spinsq/ode.hpp"

namespace spinsq::closure {

struct LState {
  double l0 = 0;
  double lz = 0;
  double dxx = 0;
  double dyy = 0;
};

struct ContractedState {
  double h0 = 0;
  double hz = 0;
  double dxx = 0;
  double dyy = 0;
};

enum class Representation { L, H };

struct ClosureConfig {
  double epsilon = 0;  // 1/N, 0 for the bosonic limit
  double kappa = 0;    // Gamma / (N chi)
  Representation representation = Representation::H;

  void validate() const;
};

LState derivs_L(const LState& s, double chi, double gamma);

/// Derivatives with respect to tau.
ContractedState derivs_h(const ContractedState& s, const ClosureConfig& config);

ContractedState to_contracted(const LState& s, double atoms);
LState from_contracted(const ContractedState& s, double atoms);

/// Initial condition: every atom in mode 1, Dxx = Dyy = N/2.
ContractedState initial_contracted();

struct ClosureRow {
  double tau = 0;
  ContractedState state;
};

struct ClosureTrajectory {
  std::vector<ClosureRow> rows;
  ode::Stats stats;

  std::vector<double> dxx() const;
};

/// Default tolerances are tighter than the exact solvers since the system
/// is four-dimensional.
inline constexpr ode::Tolerance kClosureTolerance{1e-13, 1e-11, 1e-14, 5'000'000};

/// Integrates on a sorted tau grid starting at 0. The L form runs in t with
/// chi = 1, Gamma = kappa N, N = 1/epsilon and is converted back; it needs
/// epsilon > 0. Fails with ErrorKind::Validity if h0 leaves [0, 1+1e-9] or
/// a variance goes negative.
ClosureTrajectory integrate_closure(const ClosureConfig& config,
                                    std::span<const double> taus,
                                    const ode::Tolerance& tolerance = kClosureTolerance);

struct AnalyticEstimate {
  double value = 0;
  bool heuristic = false;  // growth term included
  std::vector<std::string> warnings;
};

/// Perturbative delta_xx(tau) = (exp(-2 tau) + kappa + epsilon/2) / 2.
/// With include_growth the unstated second-order term is bracketed by
/// max(kappa, epsilon)^2 exp(2 tau) / 2 and the result is marked heuristic.
AnalyticEstimate analytic_variance(const ClosureConfig& config, double tau,
                                   bool include_growth = false);

struct ClosureMinimum {
  double tau_star = 0;
  double dxx_min = 0;
  double tau_estimate = 0;  // -log(max(kappa, epsilon)), order of magnitude
};

/// Golden-section search for the minimum of delta_xx on [0, tau_max].
/// Fails with ErrorKind::NoInteriorMinimum if delta_xx is still falling at
/// tau_max or never falls.
ClosureMinimum find_closure_minimum(const ClosureConfig& config, double tau_max = 20.0);

struct ScalingEstimate {
  bool feasible = false;      // N chi > s Gamma
  double time = 0;            // log(s) / (N chi)
  double atom_loss = 0;       // (N / s) log(s)
  double target_dxx = 0;      // 1 / s
  bool order_of_magnitude = true;
};

/// Order-of-magnitude cost of reaching squeezing factor s in [1, N].
ScalingEstimate squeezing_scalings(double s, double atoms, double chi, double gamma);

}  // namespace spinsq::closure
