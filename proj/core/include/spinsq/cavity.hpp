#pragma once

// Linearized cavity implementation: a collective spin mode S1 and the dark
// polariton P_D, coupled pairwise by xi,
//   dS1/dt = (a_S + i delta1) S1 + xi P_D^dag + noise,
//   dP_D/dt = -(gamma_D + i delta2) P_D + xi S1^dag + noise,
// with a_S = gamma_L (g1^2/g2^2 - 1) - gamma0 and gamma_D = kappa/eta + gamma_L.
// Second moments are carried as a real quadrature covariance over
// (X1, Y1, X_D, Y_D) with X = (b + b^dag)/sqrt2, Y = i(b - b^dag)/sqrt2.
//
// All rates share one unit; gamma defaults to 1.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinsq/ode.hpp"

namespace spinsq::cavity {

struct CavityParams {
  double g1 = 0;
  double g2 = 0;
  double omega1 = 0;
  double omega2 = 0;
  double delta = 0;   // single-photon detuning
  double delta1 = 0;  // two-photon detunings
  double delta2 = 0;
  double gamma = 1;
  double gamma_br1 = 1;  // branching rates, gamma_br1 + gamma_br2 = 2 gamma
  double gamma_br2 = 1;
  double gamma0 = 0;
  double kappa_cav = 0;
  double atoms = 0;

  /// Throws InvalidParameter on violations, returns soft warnings.
  std::vector<std::string> validate() const;
};

struct DerivedRates {
  double xi = 0;
  double eta = 0;
  double gamma_L = 0;
  double delta_L = 0;  // reported only
  double chi_raman = 0;

  double polariton_loss(const CavityParams& p) const { return p.kappa_cav / eta + gamma_L; }
};

DerivedRates derive_rates(const CavityParams& params);

struct LinearSystem {
  Eigen::Matrix4d drift;
  Eigen::Matrix4d diffusion;
};

/// Drift and symmetric-ordered diffusion over (X1, Y1, X_D, Y_D).
LinearSystem drift_diffusion(const CavityParams& params, const DerivedRates& rates);

/// Smallest eigenvalue of C + (i/2) Omega for a quadrature covariance of any
/// even size; nonnegative for physical states.
double symplectic_min_eigenvalue(const Eigen::MatrixXd& c);

struct CovarianceTrajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> covariances;
  double min_symplectic_eigenvalue = 0;
  double max_asymmetry = 0;
  ode::Stats stats;
};

using CovarianceCheck = std::function<void(double t, const Eigen::MatrixXd& c)>;

/// dC/dt = A C + C A^T + D. Every output goes through `check` first (if
/// set), then is tested for symmetry (1e-12 relative) and symplectic
/// positivity (-1e-8 times max(1, max|C|)); violations raise
/// ErrorKind::Physicality.
CovarianceTrajectory evolve_covariance(const Eigen::MatrixXd& drift,
                                       const Eigen::MatrixXd& diffusion,
                                       const Eigen::MatrixXd& c0,
                                       std::span<const double> times,
                                       const ode::Tolerance& tolerance = {},
                                       const CovarianceCheck& check = {});

struct QuadratureStats {
  double var_yplus = 0;
  double var_xminus = 0;
  double var_yminus = 0;
  double var_xplus = 0;
  double total_excitations = 0;  // <X+^2 + X-^2 + Y+^2 + Y-^2>
};

QuadratureStats quadrature_stats(const Eigen::Matrix4d& c);

struct QuadratureRow {
  double t = 0;
  QuadratureStats stats;
};

struct SqueezeRun {
  std::vector<QuadratureRow> rows;
  double min_symplectic_eigenvalue = 0;
};

/// Evolves from vacuum and returns quadrature statistics per output time.
/// Aborts with ErrorKind::Validity once total_excitations exceeds 0.1 N.
SqueezeRun squeeze_trajectory(const CavityParams& params, std::span<const double> times);

struct AnalyticQuadrature {
  double value = 0;
  std::vector<std::string> warnings;
};

/// (1/2){exp(-2 xi t) + (3 gamma_L + kappa/eta)/(2 xi)
///       + ((gamma_L + kappa/eta)/(2 xi))^2 exp(2 xi t)}
AnalyticQuadrature analytic_quadrature(const DerivedRates& rates, const CavityParams& params,
                                       double t);

struct SqueezingMinimum {
  double var_yplus = 0;
  double t_star = 0;
  double min_symplectic_eigenvalue = 0;
};

/// Time window that contains the squeezing minimum: t*_closed + 2/xi, or
/// 5/xi when there is no closed-form minimum.
double default_horizon(const CavityParams& params);

/// Minimum of var_yplus over time from covariance evolution, refined with a
/// parabola on a 2001-point grid. A minimum at t = 0 is returned as is.
SqueezingMinimum squeezing_minimum(const CavityParams& params);

/// Closed-form time of the minimum, or NaN when gamma_D >= 2 xi.
double closed_form_t_star(const DerivedRates& rates, const CavityParams& params);

/// Closed-form optimum gamma sqrt((5 Omega1^2 / 3 Omega2^2) g^2 N / (gamma kappa)),
/// g = g1. Ignores params.delta.
double optimal_detuning(const CavityParams& params);

struct OperatingPoint {
  double delta_opt = 0;        // closed form
  double var_yplus_opt = 0;    // sqrt(15/4) / sqrt(g^2 N / gamma kappa)
  double var_yplus_at_opt = 0; // (5 gamma_L + 3 kappa/eta)/(4 xi) at delta_opt
  double t_star = 0;           // closed form at delta_opt
  double delta_numeric = 0;    // argmin over delta of the numeric minimum
  double var_yplus_numeric = 0;
};

/// Needs g1 = g2. Also scans delta numerically on [delta_opt/4, 4 delta_opt]
/// (floored at 10 gamma).
OperatingPoint optimal_operating_point(const CavityParams& params);

enum class Regime { None, Squeezed, Strong, Heisenberg };

std::string to_string(Regime regime);

struct RegimeReport {
  Regime regime = Regime::None;
  double cooperativity = 0;         // g^2 N / (kappa gamma)
  double single_atom = 0;           // g^2 / (kappa gamma)
  double predicted_var_yplus = 0;   // order of magnitude
  std::vector<std::string> inequalities;
};

RegimeReport regime_classifier(const CavityParams& params);

struct DegenerateRow {
  double t = 0;
  double var_x = 0;
  double var_y = 0;
};

struct DegenerateRun {
  std::vector<DegenerateRow> rows;
  std::vector<std::string> warnings;
};

/// Single-mode squeezing of S at rate 2 xi with the S1 and P_D losses and
/// noise combined. X is the squeezed quadrature.
DegenerateRun degenerate_variance(const CavityParams& params, std::span<const double> times);

}  // namespace spinsq::cavity
