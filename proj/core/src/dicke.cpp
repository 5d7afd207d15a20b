#include "spinsq/dicke.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinsq/error.hpp"

namespace spinsq::dicke {

namespace {

constexpr double kNormTolerance = 1e-12;

void check_atoms(int atoms) {
  require(atoms >= 1, "atom count must be >= 1, got " + std::to_string(atoms));
}

// Rotates v so that its largest-magnitude entry (lowest index on ties) is
// real and positive.
void fix_global_phase(Vector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

}  // namespace

DickeState::DickeState(int atoms, Vector amplitudes)
    : atoms_(atoms), amplitudes_(std::move(amplitudes)) {
  check_atoms(atoms);
  require(amplitudes_.size() == atoms + 1,
          "state vector length must be N+1 = " + std::to_string(atoms + 1));
  const double norm = amplitudes_.norm();
  require(std::abs(norm * norm - 1.0) < kNormTolerance,
          "state vector is not normalized");
}

DickeState DickeState::normalized(int atoms, Vector amplitudes) {
  const double norm = amplitudes.norm();
  require(norm > 0.0, "cannot normalize a zero state vector");
  amplitudes /= norm;
  return DickeState(atoms, std::move(amplitudes));
}

Complex DickeState::amplitude(double m) const {
  const double index = m + spin();
  const long i = std::lround(index);
  require(std::abs(index - static_cast<double>(i)) < 1e-9 && i >= 0 &&
              i < dimension(),
          "m out of range");
  return amplitudes_(i);
}

SpinOperatorSet build_spin_operators(int atoms) {
  check_atoms(atoms);
  SpinOperatorSet ops;
  ops.atoms = atoms;
  const int dim = atoms + 1;
  const double j = 0.5 * atoms;

  ops.jz = Matrix::Zero(dim, dim);
  ops.jplus = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = -j + i;
    ops.jz(i, i) = m;
    if (i + 1 < dim) ops.jplus(i + 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = Complex(0, -0.5) * (ops.jplus - ops.jminus);
  // jplus is rebuilt from the Cartesian parts so J+ = Jx + iJy holds exactly.
  ops.jplus = ops.jx + Complex(0, 1) * ops.jy;
  ops.jminus = ops.jx - Complex(0, 1) * ops.jy;
  return ops;
}

DickeState bloch_ground_state(int atoms) {
  check_atoms(atoms);
  Vector psi = Vector::Zero(atoms + 1);
  psi(0) = 1.0;
  return DickeState(atoms, std::move(psi));
}

Matrix axis_eigenbasis(const SpinOperatorSet& ops, Axis axis) {
  if (axis == Axis::z) return Matrix::Identity(ops.dimension(), ops.dimension());
  const Matrix& op = axis == Axis::x ? ops.jx : ops.jy;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op);
  require(solver.info() == Eigen::Success, "eigensolver failed");
  // Eigenvalues come back ascending, i.e. m = -J..J.
  return solver.eigenvectors();
}

DickeState psi_a_state(int atoms, double a) {
  check_atoms(atoms);
  if (atoms % 2 != 0 || atoms < 2) {
    fail(ErrorKind::Unsupported,
         "psi(a) needs an even atom count >= 2, got " + std::to_string(atoms));
  }
  require(std::isfinite(a), "family parameter a must be finite");

  const SpinOperatorSet ops = build_spin_operators(atoms);
  const double j = ops.spin();
  const Matrix basis = axis_eigenbasis(ops, Axis::x);

  Vector zero = basis.col(static_cast<Eigen::Index>(j));
  fix_global_phase(zero);

  // In the frame (x', y', z') = (y, z, x) the ladder operators are Jy +- iJz.
  const double ladder = std::sqrt(j * (j + 1));
  const Complex i_unit(0, 1);
  const Vector plus = (ops.jy + i_unit * ops.jz) * zero / ladder;
  const Vector minus = (ops.jy - i_unit * ops.jz) * zero / ladder;

  Vector psi = (i_unit * zero + a * (plus - minus) / std::sqrt(2.0)) /
               std::sqrt(1.0 + a * a);
  // Normalization is exact up to rounding in the ladder step.
  psi /= psi.norm();
  return DickeState(atoms, std::move(psi));
}

std::vector<double> projections(const DickeState& state, Axis axis) {
  std::vector<double> probs(static_cast<std::size_t>(state.dimension()));
  if (axis == Axis::z) {
    for (int i = 0; i < state.dimension(); ++i) {
      probs[i] = std::norm(state.amplitudes()(i));
    }
    return probs;
  }
  const SpinOperatorSet ops = build_spin_operators(state.atoms());
  const Vector overlaps = axis_eigenbasis(ops, axis).adjoint() * state.amplitudes();
  for (int i = 0; i < state.dimension(); ++i) probs[i] = std::norm(overlaps(i));
  return probs;
}

double expectation(const Vector& psi, const Matrix& op) {
  return psi.dot(op * psi).real();
}

double variance(const Vector& psi, const Matrix& op) {
  const Vector shifted = op * psi - expectation(psi, op) * psi;
  return shifted.squaredNorm();
}

double symmetric_covariance(const Vector& psi, const Matrix& a, const Matrix& b) {
  const Vector da = a * psi - expectation(psi, a) * psi;
  const Vector db = b * psi - expectation(psi, b) * psi;
  return da.dot(db).real();
}

MomentSummary moments(const DickeState& state, const SpinOperatorSet& ops) {
  require(ops.dimension() == state.dimension(),
          "operator and state dimensions differ");
  const Vector& psi = state.amplitudes();
  MomentSummary s;
  s.mean_x = expectation(psi, ops.jx);
  s.mean_y = expectation(psi, ops.jy);
  s.mean_z = expectation(psi, ops.jz);
  s.var_x = variance(psi, ops.jx);
  s.var_y = variance(psi, ops.jy);
  s.var_z = variance(psi, ops.jz);
  s.sym_cov_xz = symmetric_covariance(psi, ops.jx, ops.jz);
  s.sym_cov_yz = symmetric_covariance(psi, ops.jy, ops.jz);
  return s;
}

MomentSummary moments(const DickeState& state) {
  return moments(state, build_spin_operators(state.atoms()));
}

}  // namespace spinsq::dicke
