// Acceptance checks. Usage: spinsq_acceptance [1..10|scaling]...
// With no argument every check runs. One PASS/FAIL line per check; the exit
// status is nonzero if any selected check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinsq/cavity.hpp"
#include "spinsq/closure.hpp"
#include "spinsq/dicke.hpp"
#include "spinsq/error.hpp"
#include "spinsq/ramsey.hpp"
#include "spinsq/twist.hpp"
#include "spinsq/wigner.hpp"

using namespace spinsq;

namespace {

// Pinned tolerances.
constexpr double kSqlTol = 1e-12;
constexpr double kConstancyTol = 1e-9;
constexpr double kMinUncertaintyRelTol = 1e-8;
constexpr double kBosonicTol = 1e-8;
constexpr double kClosureRelTol = 0.10;
constexpr double kMasterBudgetSeconds = 300.0;
constexpr double kFloorFactor = 3.0;
constexpr double kCavityLow = 0.015, kCavityHigh = 0.025;
constexpr double kTStarRelTol = 0.25;
constexpr double kThreshold = 0.5;
constexpr double kSphereTol = 1e-8;
constexpr double kThreeJTol = 1e-12;
constexpr double kRoundTripTol = 1e-9;
constexpr double kTraceDriftTol = 1e-8;
constexpr double kSymplecticTol = -1e-8;
constexpr double kExponentBand = 0.30;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

// Shared physicality record for criterion 10.
struct Physicality {
  double max_trace_drift = 0;
  double min_symplectic = std::numeric_limits<double>::infinity();
  int master_runs = 0;
  int covariance_runs = 0;
};
Physicality physicality;

// ---------------------------------------------------------------------------

Outcome sql() {
  const auto acc = ramsey::phase_accuracy(dicke::bloch_ground_state(100), std::numbers::pi / 2);
  const double err = std::abs(acc.value - 0.1);
  return {acc.valid && err < kSqlTol, fmt("delta_phi(pi/2)=%.15f |err|=%.2e tol=%.0e", acc.value,
                                          err, kSqlTol)};
}

Outcome squeezed_constancy() {
  const auto state = dicke::psi_a_state(100, -1.0);
  const double target = 1.0 / std::sqrt(2550.0);
  const auto grid = linspace(0.0, 2 * std::numbers::pi, 401);
  const auto rows = ramsey::ramsey_sweep(state, grid);
  double worst = 0, worst_phi = 0;
  int flagged = 0;
  for (const auto& r : rows) {
    if (r.flagged) {
      ++flagged;
      continue;
    }
    const double dev = std::abs(r.delta_phi - target);
    if (dev > worst) worst = dev, worst_phi = r.phi;
  }
  const double at_quarter = ramsey::phase_accuracy(state, std::numbers::pi / 2).value;
  const bool pass = flagged == 0 && worst < kConstancyTol;
  return {pass, fmt("target=%.10f delta_phi(pi/2)=%.10f max|dev|=%.4e at phi=%.4f flagged=%d "
                    "tol=%.0e",
                    target, at_quarter, worst, worst_phi, flagged, kConstancyTol)};
}

Outcome minimum_uncertainty() {
  double worst = 0;
  int worst_n = 0;
  double worst_a = 0;
  for (int n : {4, 40, 100}) {
    for (double a : {-2.0, -1.0, -0.5, 0.5, 1.0}) {
      const auto m = dicke::moments(dicke::psi_a_state(n, a));
      const double lhs = std::sqrt(m.var_x) * std::sqrt(m.var_y);
      const double rhs = 0.5 * std::abs(m.mean_z);
      const double rel = std::abs(lhs - rhs) / rhs;
      if (rel > worst) worst = rel, worst_n = n, worst_a = a;
    }
  }
  return {worst < kMinUncertaintyRelTol,
          fmt("max rel |dJx dJy - |<Jz>|/2| = %.4e (N=%d a=%g) tol=%.0e", worst, worst_n, worst_a,
              kMinUncertaintyRelTol)};
}

Outcome bosonic_law() {
  const auto taus = linspace(0.0, 3.0, 301);
  const auto traj = closure::integrate_closure({0.0, 0.0, closure::Representation::H}, taus);
  double worst = 0;
  for (const auto& r : traj.rows) {
    worst = std::max(worst, std::abs(r.state.dxx - 0.5 * std::exp(-2 * r.tau)));
  }
  return {worst < kBosonicTol, fmt("max|delta_xx - exp(-2tau)/2| = %.3e over [0,3] tol=%.0e",
                                   worst, kBosonicTol)};
}

Outcome closure_vs_oracle() {
  const int n = 12;
  const auto taus = linspace(0.0, 3.0, 301);
  std::vector<double> times(taus);
  for (double& t : times) t /= n;
  bool pass = true;
  std::ostringstream detail;
  double slowest = 0;
  for (double kappa : {0.0, 0.05, 0.1}) {
    const auto start = std::chrono::steady_clock::now();
    const auto run = twist::evolve_master({n, 1.0, kappa * n, kappa * n}, times);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                              start)
                                    .count());
    physicality.max_trace_drift =
        std::max(physicality.max_trace_drift, run.diagnostics.max_trace_drift);
    ++physicality.master_runs;
    const auto exact_min = twist::find_min_variance(run.trajectory);
    const auto approx =
        closure::integrate_closure({1.0 / n, kappa, closure::Representation::H}, taus);
    double worst = 0;
    for (std::size_t i = 0; i <= exact_min.index; ++i) {
      const double e = run.trajectory.rows[i].dxx / n;
      worst = std::max(worst, std::abs(approx.rows[i].state.dxx - e) / e);
    }
    pass = pass && worst < kClosureRelTol;
    detail << fmt("kappa=%.2f: max rel err %.3f up to tau*=%.3f; ", kappa, worst,
                  exact_min.t_star * n);
  }
  pass = pass && slowest < kMasterBudgetSeconds;
  detail << fmt("slowest master run %.2fs; tol=%.2f", slowest, kClosureRelTol);
  return {pass, detail.str()};
}

Outcome finite_size_floor() {
  const int n = 20;
  const double eps = 1.0 / n;
  const auto times = linspace(0.0, 4.0 / n, 801);
  const auto traj = twist::evolve_unitary(n, 1.0, times);
  const auto m = twist::find_min_variance(traj);
  const double after = traj.rows.back().dxx / n;
  const bool pass = m.delta_xx_min >= eps / kFloorFactor && m.delta_xx_min <= eps * kFloorFactor &&
                    after > m.delta_xx_min;
  return {pass, fmt("N=20 delta_xx_min=%.6f at tau*=%.4f (reference value), eps=%.3f, "
                    "delta_xx(tau=4)=%.4f, factor=%.0f",
                    m.delta_xx_min, m.t_star * n, eps, after, kFloorFactor)};
}

cavity::CavityParams cavity_reference(double cooperativity) {
  cavity::CavityParams p;
  p.kappa_cav = 1.0;
  p.atoms = 1e6;
  p.g1 = p.g2 = std::sqrt(cooperativity / p.atoms);
  p.omega1 = p.omega2 = 10.0;
  p.delta = cavity::optimal_detuning(p);
  return p;
}

Outcome cavity_optimum() {
  const auto p = cavity_reference(1e4);
  const auto m = cavity::squeezing_minimum(p);
  physicality.min_symplectic = std::min(physicality.min_symplectic, m.min_symplectic_eigenvalue);
  ++physicality.covariance_runs;
  const double t_cf = cavity::closed_form_t_star(cavity::derive_rates(p), p);
  const double rel = std::abs(m.t_star - t_cf) / t_cf;
  const bool pass = m.var_yplus >= kCavityLow && m.var_yplus <= kCavityHigh && rel < kTStarRelTol;
  return {pass, fmt("Delta_opt=%.3f min varYplus=%.5f in [%.3f,%.3f]; t*=%.4f closed form %.4f "
                    "rel=%.3f tol=%.2f",
                    p.delta, m.var_yplus, kCavityLow, kCavityHigh, m.t_star, t_cf, rel,
                    kTStarRelTol)};
}

Outcome no_squeezing() {
  auto p = cavity_reference(0.5);
  // The closed-form optimum falls below the adiabatic floor here.
  p.delta = std::max(p.delta, 30.0 * p.gamma);
  const auto r = cavity::derive_rates(p);
  std::vector<double> times = linspace(0.0, 50.0 / std::max(r.xi, p.gamma), 2001);
  const auto run = cavity::squeeze_trajectory(p, times);
  physicality.min_symplectic = std::min(physicality.min_symplectic, run.min_symplectic_eigenvalue);
  ++physicality.covariance_runs;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& row : run.rows) lowest = std::min(lowest, row.stats.var_yplus);
  return {lowest >= kThreshold - 1e-12,
          fmt("g^2N/(kappa gamma)=0.5 Delta=%.1f min varYplus=%.6f >= %.1f", p.delta, lowest,
              kThreshold)};
}

Outcome wigner_suite() {
  std::mt19937_64 rng(20240101);
  std::normal_distribution<double> gauss;
  const int atoms = 40;  // J = 20
  const double expected = std::sqrt(4 * std::numbers::pi / (atoms + 1));
  double worst_integral = 0, worst_round = 0;
  for (int s = 0; s < 20; ++s) {
    dicke::Vector v(atoms + 1);
    for (auto& x : v) x = {gauss(rng), gauss(rng)};
    const auto state = dicke::DickeState::normalized(atoms, v);
    const auto d = wigner::multipole_coeffs(state);
    worst_integral = std::max(worst_integral, std::abs(wigner::sphere_integral(d) - expected));
    const Eigen::MatrixXcd rho = state.amplitudes() * state.amplitudes().adjoint();
    worst_round = std::max(worst_round, (wigner::reconstruct(d) - rho).norm());
  }

  std::uniform_int_distribution<int> pick(0, 16);
  double worst_3j = 0;
  int triples = 0;
  while (triples < 500) {
    const int tj1 = pick(rng), tj2 = pick(rng);
    const int lo = std::abs(tj1 - tj2), hi = tj1 + tj2;
    const int tj3 = lo + 2 * std::uniform_int_distribution<int>(0, (hi - lo) / 2)(rng);
    const int tm1 = -tj1 + 2 * std::uniform_int_distribution<int>(0, tj1)(rng);
    const int tm2 = -tj2 + 2 * std::uniform_int_distribution<int>(0, tj2)(rng);
    const int tm3 = -tm1 - tm2;
    if (std::abs(tm3) > tj3) continue;
    const double ref = oracle::threej(tj1, tj2, tj3, tm1, tm2, tm3);
    const double got =
        wigner::wigner3j(tj1 / 2.0, tj2 / 2.0, tj3 / 2.0, tm1 / 2.0, tm2 / 2.0, tm3 / 2.0);
    worst_3j = std::max(worst_3j, std::abs(got - ref));
    ++triples;
  }
  const bool pass =
      worst_integral < kSphereTol && worst_3j < kThreeJTol && worst_round < kRoundTripTol;
  return {pass, fmt("sphere integral max|err|=%.2e (tol %.0e); 3j max|err|=%.2e over %d triples "
                    "(tol %.0e); round trip max=%.2e (tol %.0e)",
                    worst_integral, kSphereTol, worst_3j, triples, kThreeJTol, worst_round,
                    kRoundTripTol)};
}

Outcome physicality_guards() {
  if (physicality.master_runs == 0) closure_vs_oracle();
  if (physicality.covariance_runs == 0) {
    cavity_optimum();
    no_squeezing();
  }
  const bool pass = physicality.max_trace_drift < kTraceDriftTol &&
                    physicality.min_symplectic >= kSymplecticTol;
  return {pass, fmt("%d master runs: max trace drift %.2e (tol %.0e); %d covariance runs: min "
                    "symplectic eigenvalue %.2e (floor %.0e)",
                    physicality.master_runs, physicality.max_trace_drift, kTraceDriftTol,
                    physicality.covariance_runs, physicality.min_symplectic, kSymplecticTol)};
}

Outcome scaling() {
  std::vector<double> log_log_n, log_tau;
  std::ostringstream detail;
  bool monotone = true;
  double previous = 0;
  for (int n : {8, 12, 16, 20}) {
    const auto traj = twist::evolve_unitary(n, 1.0, linspace(0.0, 4.0 / n, 801));
    const double tau = twist::find_min_variance(traj).t_star * n;
    detail << fmt("N=%d tau*=%.4f; ", n, tau);
    monotone = monotone && tau > previous;
    previous = tau;
    log_log_n.push_back(std::log(std::log(double(n))));
    log_tau.push_back(std::log(tau));
  }
  const double mx = std::accumulate(log_log_n.begin(), log_log_n.end(), 0.0) / 4;
  const double my = std::accumulate(log_tau.begin(), log_tau.end(), 0.0) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (log_log_n[i] - mx) * (log_tau[i] - my);
    sxx += (log_log_n[i] - mx) * (log_log_n[i] - mx);
  }
  const double exponent = sxy / sxx;
  const bool pass = monotone && std::abs(exponent - 1.0) <= kExponentBand;
  detail << fmt("exponent of tau* vs log N = %.3f (1 +- %.2f), monotone=%s", exponent,
                kExponentBand, monotone ? "yes" : "no");
  return {pass, detail.str()};
}

struct Check {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

const std::vector<Check>& checks() {
  static const std::vector<Check> all{
      {"1", "standard quantum limit, Bloch state N=100", sql},
      {"2", "squeezed-family accuracy constant over phase, N=100 a=-1", squeezed_constancy},
      {"3", "minimum-uncertainty product for psi(a)", minimum_uncertainty},
      {"4", "bosonic lossless squeezing law", bosonic_law},
      {"5", "moment closure vs master equation, N=12", closure_vs_oracle},
      {"6", "finite-size squeezing floor, N=20", finite_size_floor},
      {"7", "cavity optimum at cooperativity 1e4", cavity_optimum},
      {"8", "no squeezing below threshold", no_squeezing},
      {"9", "Wigner suite", wigner_suite},
      {"10", "physicality guards", physicality_guards},
      {"scaling", "tau* growth with log N", scaling},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : checks()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %s: %s | %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(),
                c.title.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
