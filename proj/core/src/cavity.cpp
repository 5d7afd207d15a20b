#include "spinsq/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spinsq/error.hpp"

namespace spinsq::cavity {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 2x2 quadrature block for db_i/dt = m b_j + k b_j^dag.
Matrix2d quadrature_block(std::complex<double> m, std::complex<double> k) {
  Matrix2d block;
  block << m.real() + k.real(), m.imag() - k.imag(),
           -m.imag() - k.imag(), m.real() - k.real();
  return block;
}

struct ModeNoise {
  double spin = 0;        // S1, symmetric-ordered
  double polariton = 0;   // P_D, symmetric-ordered
};

ModeNoise mode_noise(const CavityParams& p, const DerivedRates& r) {
  const double pump1 = 2.0 * r.gamma_L * p.gamma_br1 / p.gamma;
  const double pump2 = 2.0 * r.gamma_L * p.gamma_br2 / p.gamma;
  ModeNoise n;
  n.spin = 0.5 * ((pump2 + 2.0 * p.gamma0) + pump1);
  // Cavity correlator doubled to 2 kappa/eta: pure cavity loss must leave
  // the vacuum invariant.
  n.polariton = 0.5 * ((2.0 * p.kappa_cav / r.eta + pump2) + pump1);
  return n;
}

double spin_gain(const CavityParams& p, const DerivedRates& r) {
  return r.gamma_L * (p.g1 * p.g1 / (p.g2 * p.g2) - 1.0) - p.gamma0;
}

CavityParams at_detuning(CavityParams p, double delta) {
  p.delta = delta;
  return p;
}

}  // namespace

std::vector<std::string> CavityParams::validate() const {
  auto finite_nonneg = [](double v, const char* name) {
    require(std::isfinite(v) && v >= 0.0, std::string(name) + " must be finite and >= 0");
  };
  finite_nonneg(g1, "g1");
  finite_nonneg(g2, "g2");
  finite_nonneg(omega1, "Omega1");
  finite_nonneg(omega2, "Omega2");
  finite_nonneg(gamma_br1, "gamma_br1");
  finite_nonneg(gamma_br2, "gamma_br2");
  finite_nonneg(gamma0, "gamma0");
  finite_nonneg(kappa_cav, "kappa");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(delta1) && std::isfinite(delta2), "two-photon detunings must be finite");
  require(g2 > 0.0, "g2 must be > 0");
  require(omega2 > 0.0, "Omega2 must be > 0");
  require(std::isfinite(atoms) && atoms >= 1.0, "N must be >= 1");
  require(std::isfinite(delta) && delta >= 10.0 * gamma,
          "Delta must be >= 10 gamma for adiabatic elimination");
  require(std::abs(gamma_br1 + gamma_br2 - 2.0 * gamma) <= 1e-9 * std::max(1.0, gamma),
          "gamma_br1 + gamma_br2 must equal 2 gamma");
  std::vector<std::string> warnings;
  if (delta < 30.0 * gamma) warnings.push_back("Delta < 30 gamma: adiabatic elimination marginal");
  if (gamma0 > 0.0) warnings.push_back("gamma0 > 0 is outside the validated regime");
  return warnings;
}

DerivedRates derive_rates(const CavityParams& p) {
  p.validate();
  DerivedRates r;
  const double n = p.atoms;
  r.eta = p.g2 * p.g2 * n / (p.omega2 * p.omega2);
  r.xi = p.omega1 * p.omega2 / p.delta * p.g1 * std::sqrt(n) /
         std::sqrt(p.g2 * p.g2 * n + p.omega2 * p.omega2);
  r.gamma_L = p.gamma * p.omega1 * p.omega1 / (p.delta * p.delta);
  r.delta_L = p.omega1 * p.omega1 / p.delta;
  r.chi_raman = p.g1 * std::sqrt(n) * p.omega1 / p.delta;
  return r;
}

LinearSystem drift_diffusion(const CavityParams& p, const DerivedRates& r) {
  using C = std::complex<double>;
  const C m_spin(spin_gain(p, r), p.delta1);
  const C m_pol(-r.polariton_loss(p), -p.delta2);
  const C k(r.xi, 0.0);

  LinearSystem sys;
  sys.drift.setZero();
  sys.drift.block<2, 2>(0, 0) = quadrature_block(m_spin, 0.0);
  sys.drift.block<2, 2>(0, 2) = quadrature_block(0.0, k);
  sys.drift.block<2, 2>(2, 2) = quadrature_block(m_pol, 0.0);
  sys.drift.block<2, 2>(2, 0) = quadrature_block(0.0, k);

  const ModeNoise noise = mode_noise(p, r);
  sys.diffusion = Eigen::Vector4d(noise.spin, noise.spin, noise.polariton, noise.polariton)
                      .asDiagonal();
  return sys;
}

double symplectic_min_eigenvalue(const MatrixXd& c) {
  require(c.rows() == c.cols() && c.rows() % 2 == 0, "covariance must be square of even size");
  MatrixXcd h = c.cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < c.rows(); i += 2) {
    h(i, i + 1) += std::complex<double>(0, 0.5);
    h(i + 1, i) -= std::complex<double>(0, 0.5);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

CovarianceTrajectory evolve_covariance(const MatrixXd& drift, const MatrixXd& diffusion,
                                       const MatrixXd& c0, std::span<const double> times,
                                       const ode::Tolerance& tolerance,
                                       const CovarianceCheck& check) {
  const auto n = drift.rows();
  require(drift.cols() == n && diffusion.rows() == n && diffusion.cols() == n &&
              c0.rows() == n && c0.cols() == n,
          "drift, diffusion and covariance must share one square shape");
  require(!times.empty(), "time grid is empty");
  require(symplectic_min_eigenvalue(c0) >= -1e-8, "initial covariance is unphysical");

  CovarianceTrajectory traj;
  traj.min_symplectic_eigenvalue = std::numeric_limits<double>::infinity();
  traj.times.reserve(times.size());
  traj.covariances.reserve(times.size());

  auto rhs = [&](double, const MatrixXd& c) -> MatrixXd {
    const MatrixXd ac = drift * c;
    return ac + ac.transpose() + diffusion;
  };
  auto observe = [&](double t, const MatrixXd& c) {
    if (check) check(t, c);
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    const double asym = (c - c.transpose()).cwiseAbs().maxCoeff() / scale;
    const double eig = symplectic_min_eigenvalue(c);
    traj.max_asymmetry = std::max(traj.max_asymmetry, asym);
    traj.min_symplectic_eigenvalue = std::min(traj.min_symplectic_eigenvalue, eig);
    if (asym > 1e-12 || eig < -1e-8 * scale) {
      std::ostringstream msg;
      msg << "covariance left the physical set at t=" << t << " (asymmetry " << asym
          << ", min symplectic eigenvalue " << eig << ")";
      fail(ErrorKind::Physicality, msg.str());
    }
    traj.times.push_back(t);
    traj.covariances.push_back(c);
  };
  traj.stats = ode::integrate<MatrixXd>(rhs, c0, times, tolerance, observe);
  return traj;
}

QuadratureStats quadrature_stats(const Matrix4d& c) {
  QuadratureStats s;
  s.var_yplus = 0.5 * (c(1, 1) + c(3, 3) + 2.0 * c(1, 3));
  s.var_yminus = 0.5 * (c(1, 1) + c(3, 3) - 2.0 * c(1, 3));
  s.var_xplus = 0.5 * (c(0, 0) + c(2, 2) + 2.0 * c(0, 2));
  s.var_xminus = 0.5 * (c(0, 0) + c(2, 2) - 2.0 * c(0, 2));
  s.total_excitations = s.var_yplus + s.var_yminus + s.var_xplus + s.var_xminus;
  return s;
}

SqueezeRun squeeze_trajectory(const CavityParams& params, std::span<const double> times) {
  const DerivedRates rates = derive_rates(params);
  const LinearSystem sys = drift_diffusion(params, rates);
  const double limit = 0.1 * params.atoms;
  auto guard = [limit](double t, const MatrixXd& c) {
    const double total = quadrature_stats(c).total_excitations;
    if (total > limit) {
      std::ostringstream msg;
      msg << "bosonic approximation invalid at t=" << t << ": total excitations " << total
          << " exceed 0.1 N = " << limit;
      fail(ErrorKind::Validity, msg.str());
    }
  };
  const CovarianceTrajectory traj = evolve_covariance(
      sys.drift, sys.diffusion, 0.5 * MatrixXd::Identity(4, 4), times, {}, guard);

  SqueezeRun run;
  run.min_symplectic_eigenvalue = traj.min_symplectic_eigenvalue;
  run.rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    run.rows.push_back({traj.times[i], quadrature_stats(traj.covariances[i])});
  }
  return run;
}

AnalyticQuadrature analytic_quadrature(const DerivedRates& r, const CavityParams& p,
                                       double t) {
  require(r.xi > 0.0, "analytic quadrature needs xi > 0");
  require(std::isfinite(t) && t >= 0.0, "t must be >= 0");
  AnalyticQuadrature out;
  const double loss = r.polariton_loss(p);
  const double ratio = loss / (2.0 * r.xi);
  out.value = 0.5 * (std::exp(-2.0 * r.xi * t) +
                     (3.0 * r.gamma_L + p.kappa_cav / r.eta) / (2.0 * r.xi) +
                     ratio * ratio * std::exp(2.0 * r.xi * t));
  if (r.xi * t <= 1.0) out.warnings.push_back("xi t <= 1: formula not valid");
  if (std::abs(p.g1 - p.g2) > 1e-12 * std::max(p.g1, p.g2)) {
    out.warnings.push_back("g1 != g2: formula assumes equal couplings");
  }
  return out;
}

double closed_form_t_star(const DerivedRates& r, const CavityParams& p) {
  if (!(r.xi > 0.0)) return kNaN;
  const double ratio = r.polariton_loss(p) / (2.0 * r.xi);
  if (!(ratio < 1.0)) return kNaN;
  return -std::log(ratio) / (2.0 * r.xi);
}

double default_horizon(const CavityParams& params) {
  const DerivedRates rates = derive_rates(params);
  const double t_cf = closed_form_t_star(rates, params);
  if (std::isfinite(t_cf)) return t_cf + 2.0 / rates.xi;
  if (rates.xi > 0.0) return 5.0 / rates.xi;
  return 10.0 / std::max(rates.polariton_loss(params), params.gamma);
}

SqueezingMinimum squeezing_minimum(const CavityParams& params) {
  const double horizon = default_horizon(params);
  constexpr int kPoints = 2000;
  std::vector<double> grid(kPoints + 1);
  for (int i = 0; i <= kPoints; ++i) grid[i] = horizon * i / kPoints;
  const SqueezeRun run = squeeze_trajectory(params, grid);

  std::size_t best = 0;
  for (std::size_t i = 1; i < run.rows.size(); ++i) {
    if (run.rows[i].stats.var_yplus < run.rows[best].stats.var_yplus) best = i;
  }
  SqueezingMinimum out{run.rows[best].stats.var_yplus, run.rows[best].t,
                       run.min_symplectic_eigenvalue};
  if (best == 0 || best + 1 == run.rows.size()) return out;

  // Uniform grid: vertex of the parabola through the three points.
  const double y0 = run.rows[best - 1].stats.var_yplus;
  const double y1 = run.rows[best].stats.var_yplus;
  const double y2 = run.rows[best + 1].stats.var_yplus;
  const double curvature = y0 - 2.0 * y1 + y2;
  if (curvature > 0.0) {
    const double h = grid[1] - grid[0];
    const double shift = 0.5 * (y0 - y2) / curvature;
    out.t_star = run.rows[best].t + shift * h;
    out.var_yplus = y1 - 0.25 * (y0 - y2) * shift;
  }
  return out;
}

double optimal_detuning(const CavityParams& params) {
  require(params.kappa_cav > 0.0 && params.gamma > 0.0 && params.omega2 > 0.0,
          "optimal detuning needs kappa, gamma and Omega2 > 0");
  const double cooperativity =
      params.g1 * params.g1 * params.atoms / (params.gamma * params.kappa_cav);
  return params.gamma * std::sqrt(5.0 * params.omega1 * params.omega1 /
                                  (3.0 * params.omega2 * params.omega2) * cooperativity);
}

OperatingPoint optimal_operating_point(const CavityParams& params) {
  require(std::abs(params.g1 - params.g2) <= 1e-12 * std::max(params.g1, params.g2),
          "optimal operating point needs g1 = g2");
  require(params.kappa_cav > 0.0, "optimal operating point needs kappa > 0");
  const double cooperativity =
      params.g1 * params.g1 * params.atoms / (params.gamma * params.kappa_cav);

  OperatingPoint op;
  op.delta_opt = optimal_detuning(params);
  op.var_yplus_opt = std::sqrt(15.0 / 4.0) / std::sqrt(cooperativity);

  const CavityParams at_opt = at_detuning(params, op.delta_opt);
  const DerivedRates rates = derive_rates(at_opt);
  op.var_yplus_at_opt =
      (5.0 * rates.gamma_L + 3.0 * params.kappa_cav / rates.eta) / (4.0 * rates.xi);
  op.t_star = closed_form_t_star(rates, at_opt);

  auto objective = [&](double log_delta) {
    return squeezing_minimum(at_detuning(params, std::exp(log_delta))).var_yplus;
  };
  const double lo_bound = std::log(std::max(op.delta_opt / 4.0, 10.0 * params.gamma));
  const double hi_bound = std::log(std::max(4.0 * op.delta_opt, 40.0 * params.gamma));
  constexpr int kCoarse = 16;
  std::vector<double> xs(kCoarse + 1), fs(kCoarse + 1);
  for (int i = 0; i <= kCoarse; ++i) {
    xs[i] = lo_bound + (hi_bound - lo_bound) * i / kCoarse;
    fs[i] = objective(xs[i]);
  }
  const auto best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  double lo = xs[std::max(best - 1, 0)];
  double hi = xs[std::min(best + 1, kCoarse)];
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double x = 0.5 * (lo + hi);
  op.delta_numeric = std::exp(x);
  op.var_yplus_numeric = objective(x);
  return op;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::None: return "none";
    case Regime::Squeezed: return "squeezed";
    case Regime::Strong: return "strong";
    case Regime::Heisenberg: return "heisenberg";
  }
  return "unknown";
}

RegimeReport regime_classifier(const CavityParams& params) {
  require(std::isfinite(params.g1) && params.g1 >= 0.0, "g1 must be >= 0");
  require(std::isfinite(params.kappa_cav) && params.kappa_cav > 0.0, "kappa must be > 0");
  require(std::isfinite(params.gamma) && params.gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(params.atoms) && params.atoms >= 1.0, "N must be >= 1");

  RegimeReport report;
  report.single_atom = params.g1 * params.g1 / (params.kappa_cav * params.gamma);
  report.cooperativity = report.single_atom * params.atoms;
  const double band = 1.0 / std::sqrt(10.0);

  std::ostringstream ineq;
  ineq << "g^2 N/(kappa gamma) = " << report.cooperativity
       << (report.cooperativity > 1.0 ? " > 1" : " <= 1");
  report.inequalities.push_back(ineq.str());
  ineq.str("");
  ineq << "g^2/(kappa gamma) = " << report.single_atom
       << (report.single_atom >= band ? " >= " : " < ") << band;
  report.inequalities.push_back(ineq.str());
  ineq.str("");
  ineq << "g^2/(kappa gamma) = " << report.single_atom
       << (report.single_atom >= params.atoms * band ? " >= " : " < ") << params.atoms * band
       << " (N/sqrt10)";
  report.inequalities.push_back(ineq.str());

  if (report.cooperativity <= 1.0) {
    report.regime = Regime::None;
    report.predicted_var_yplus = 0.5;
  } else if (report.single_atom >= params.atoms * band) {
    report.regime = Regime::Heisenberg;
    report.predicted_var_yplus = 1.0 / params.atoms;
  } else if (report.single_atom >= band) {
    report.regime = Regime::Strong;
    report.predicted_var_yplus = 1.0 / std::sqrt(params.atoms);
  } else {
    report.regime = Regime::Squeezed;
    report.predicted_var_yplus = std::sqrt(15.0 / 4.0) / std::sqrt(report.cooperativity);
  }
  return report;
}

DegenerateRun degenerate_variance(const CavityParams& params, std::span<const double> times) {
  const DerivedRates rates = derive_rates(params);
  DegenerateRun run;
  if (rates.eta < 10.0) run.warnings.push_back("eta < 10: P_D ~ -S is not accurate");

  const std::complex<double> m(spin_gain(params, rates) - rates.polariton_loss(params),
                               params.delta1 - params.delta2);
  // Negative pair amplitude puts the squeezing in X.
  const std::complex<double> k(-2.0 * rates.xi, 0.0);
  const ModeNoise noise = mode_noise(params, rates);
  const MatrixXd drift = quadrature_block(m, k);
  const MatrixXd diffusion = (noise.spin + noise.polariton) * MatrixXd::Identity(2, 2);

  const CovarianceTrajectory traj =
      evolve_covariance(drift, diffusion, 0.5 * MatrixXd::Identity(2, 2), times);
  run.rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    run.rows.push_back({traj.times[i], traj.covariances[i](0, 0), traj.covariances[i](1, 1)});
  }
  return run;
}

}  // namespace spinsq::cavity
