#pragma once

// Exact evolution under the two-axis counter-twisting Hamiltonian
//   H = chi (LxLy + LyLx) = -i chi/2 (L+^2 - L-^2)
// with L+ = a2^dag a1. Used as the brute-force reference for the moment
// closure.
//
//   * evolve_unitary: loss-free, in the (N+1)-dimensional Dicke basis.
//   * evolve_master:  two bosonic modes with independent loss, Lindblad
//                     operators sqrt(2 gamma_i) a_i so that <n_i> decays as
//                     exp(-2 gamma_i t), matching the Langevin drift
//                     da_i/dt = -gamma_i a_i.
//
// Both start with every atom in mode 1 (|J, -J>, or |n1 = N, n2 = 0>).

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinsq/ode.hpp"

namespace spinsq::twist {

struct TwistParams {
  int atoms = 0;
  double chi = 0;     // single-atom nonlinearity
  double gamma1 = 0;  // amplitude loss of mode 1
  double gamma2 = 0;  // amplitude loss of mode 2

  double mean_loss() const noexcept { return 0.5 * (gamma1 + gamma2); }
  double loss_asymmetry() const noexcept { return 0.5 * (gamma1 - gamma2); }
  void validate() const;
};

/// One output time. Second moments follow the symmetrized convention
/// D_ij = <LiLj + LjLi> - 2<Li><Lj>, so Dxx(0) = Dyy(0) = N/2.
struct MomentRow {
  double t = 0;
  double l0 = 0;
  double lz = 0;
  double dxx = 0;
  double dyy = 0;
  double lx = 0;
  double ly = 0;
  double casimir = 0;  // <L^2> = <Lx^2 + Ly^2 + Lz^2>
};

struct MomentTrajectory {
  std::vector<MomentRow> rows;

  std::vector<double> times() const;
  std::vector<double> dxx() const;
};

/// Unitary run. Requires even N >= 2 and a sorted grid starting at 0.
/// Diagonalizes H once and applies exp(-iHt) exactly at each grid time;
/// fails with ErrorKind::Integrator if the norm drifts beyond 1e-9.
MomentTrajectory evolve_unitary(int atoms, double chi, std::span<const double> times);

/// Ordered two-mode Fock basis {(n1, n2): n1 + n2 <= n_max}, sorted by total
/// number and then by n1 ascending.
class FockBasis {
 public:
  explicit FockBasis(int n_max);

  int n_max() const noexcept { return n_max_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::pair<int, int>& state(std::size_t i) const { return states_.at(i); }
  std::size_t index(int n1, int n2) const;

 private:
  int n_max_;
  std::vector<std::pair<int, int>> states_;
};

/// Density matrix over a FockBasis.
struct TwoModeFockDensity {
  FockBasis basis;
  Eigen::MatrixXcd rho;

  double trace() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

struct MasterDiagnostics {
  double max_trace_drift = 0;
  double max_hermiticity_error = 0;
  double min_population = 0;   // smallest diagonal entry seen
  double min_eigenvalue = 0;   // smallest eigenvalue seen
  ode::Stats stats;
};

struct MasterRun {
  MomentTrajectory trajectory;
  TwoModeFockDensity final_state;
  MasterDiagnostics diagnostics;
};

/// Largest atom number accepted by evolve_master.
inline constexpr int kMaxMasterAtoms = 30;

/// Lindblad evolution with basis cutoff N_max = N. Checks trace (1e-8),
/// Hermiticity (1e-10) and positivity (-1e-8) at every output time and
/// fails with ErrorKind::Physicality on violation.
MasterRun evolve_master(const TwistParams& params, std::span<const double> times,
                        const ode::Tolerance& tolerance = {});

struct MinVariance {
  double t_star = 0;
  double delta_xx_min = 0;  // Dxx(t_star) / N
  std::size_t index = 0;    // grid index of the discrete minimum
};

/// Locates the interior minimum of Dxx and refines it with a parabola
/// through the neighbouring grid points. Dxx is scaled by the initial atom
/// number l0(0). Fails with ErrorKind::NoInteriorMinimum if the discrete
/// minimum sits on either end of the grid.
MinVariance find_min_variance(const MomentTrajectory& trajectory);

}  // namespace spinsq::twist
