#pragma once

// Collective-spin states of N two-level atoms in the symmetric (Dicke)
// subspace |J, m>, J = N/2. Index i of every vector/matrix corresponds to
// m = -J + i.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace spinsq::dicke {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Normalized pure state in the Dicke basis. Immutable after construction.
class DickeState {
 public:
  /// Throws InvalidParameter if the length is not N+1 or the norm deviates
  /// from 1 by more than 1e-12.
  DickeState(int atoms, Vector amplitudes);

  /// Same as above but rescales a nonzero vector to unit norm first.
  static DickeState normalized(int atoms, Vector amplitudes);

  int atoms() const noexcept { return atoms_; }
  double spin() const noexcept { return 0.5 * atoms_; }
  int dimension() const noexcept { return atoms_ + 1; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Complex amplitude(double m) const;

 private:
  int atoms_;
  Vector amplitudes_;
};

struct SpinOperatorSet {
  int atoms = 0;
  Matrix jx, jy, jz, jplus, jminus;

  double spin() const noexcept { return 0.5 * atoms; }
  int dimension() const noexcept { return atoms + 1; }
};

SpinOperatorSet build_spin_operators(int atoms);

/// All atoms in the lower level: |J, -J>.
DickeState bloch_ground_state(int atoms);

/// The squeezed family
///   |psi(a)> = (i|Jx=0> + a(|Jx=+1> - |Jx=-1>)/sqrt 2) / sqrt(1+a^2).
/// |Jx=+-1> are generated from |Jx=0> with the x-frame ladder Jy +- iJz;
/// that relative phase is what gives <Jz> = 2a/(1+a^2) sqrt(J(J+1)/2).
/// The global phase of |Jx=0> is fixed by making its largest component
/// (lowest m on ties) real and positive. Requires even N >= 2.
DickeState psi_a_state(int atoms, double a);

enum class Axis { x, y, z };

/// Eigenbasis of J_axis as columns, ordered by eigenvalue m = -J..J.
Matrix axis_eigenbasis(const SpinOperatorSet& ops, Axis axis);

/// P_axis(m) = |<J_axis = m|psi>|^2, indexed by m = -J + i.
std::vector<double> projections(const DickeState& state, Axis axis);

/// First and second moments. Variances use the (Delta A)^2 = <A^2> - <A>^2
/// convention; sym_cov_ab = <AB + BA>/2 - <A><B>. The symmetrized double
/// covariances of the moment equations are twice these.
struct MomentSummary {
  double mean_x = 0, mean_y = 0, mean_z = 0;
  double var_x = 0, var_y = 0, var_z = 0;
  double sym_cov_xz = 0, sym_cov_yz = 0;
};

MomentSummary moments(const DickeState& state, const SpinOperatorSet& ops);
MomentSummary moments(const DickeState& state);

/// <psi|A|psi> for Hermitian A (real part).
double expectation(const Vector& psi, const Matrix& op);

/// ||(A - <A>) psi||^2, which avoids the cancellation in <A^2> - <A>^2.
double variance(const Vector& psi, const Matrix& op);

/// Re <(A - <A>) psi | (B - <B>) psi>.
double symmetric_covariance(const Vector& psi, const Matrix& a, const Matrix& b);

}  // namespace spinsq::dicke
