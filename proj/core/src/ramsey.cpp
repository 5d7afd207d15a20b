#include "spinsq/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spinsq/error.hpp"

namespace spinsq::ramsey {

using dicke::Complex;
using dicke::DickeState;
using dicke::Matrix;
using dicke::MomentSummary;

namespace {

// Sensitivities below this fraction of J count as zero.
constexpr double kSensitivityFloor = 1e-10;

struct Closed {
  double signal;
  double variance;
  double slope;
};

Closed closed_form(const MomentSummary& s, double phi) {
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  Closed out;
  out.signal = s.mean_z * c - s.mean_x * sn;
  // The cross term is cos*sin*(<JxJz + JzJx> - 2<Jz><Jx>) = 2cs*sym_cov.
  out.variance = s.var_z * c * c + s.var_x * sn * sn - 2.0 * c * sn * s.sym_cov_xz;
  out.slope = -s.mean_z * sn - s.mean_x * c;
  return out;
}

PhaseAccuracy accuracy_from(const Closed& f, double spin, double phi) {
  PhaseAccuracy acc;
  const double slope = std::abs(f.slope);
  if (!(slope > kSensitivityFloor * std::max(spin, 1.0))) {
    acc.valid = false;
    acc.value = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream msg;
    msg << "zero sensitivity at phi=" << phi << " (|d<Jz>/dphi|=" << slope << ")";
    acc.diagnostic = msg.str();
    return acc;
  }
  acc.value = std::sqrt(std::max(f.variance, 0.0)) / slope;
  return acc;
}

Matrix rotated_jz(const dicke::SpinOperatorSet& ops, double phi) {
  const Matrix u = ramsey_unitary(ops.atoms, phi);
  return u.adjoint() * ops.jz * u;
}

}  // namespace

Matrix ramsey_unitary(int atoms, double phi) {
  require(std::isfinite(phi), "phase must be finite");
  const dicke::SpinOperatorSet ops = dicke::build_spin_operators(atoms);
  const int dim = ops.dimension();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(ops.jx);
  const Matrix& v = solver.eigenvectors();
  const Eigen::VectorXd& m = solver.eigenvalues();
  const double half_pi = std::numbers::pi / 2;

  Eigen::VectorXcd forward(dim), backward(dim), precess(dim);
  for (int i = 0; i < dim; ++i) {
    forward(i) = std::exp(Complex(0, half_pi * m(i)));
    backward(i) = std::exp(Complex(0, -half_pi * m(i)));
    precess(i) = std::exp(Complex(0, -phi * ops.jz(i, i).real()));
  }
  const Matrix pulse_in = v * backward.asDiagonal() * v.adjoint();
  const Matrix pulse_out = v * forward.asDiagonal() * v.adjoint();
  return pulse_out * precess.asDiagonal() * pulse_in;
}

double ramsey_signal(const DickeState& state, double phi) {
  return closed_form(dicke::moments(state), phi).signal;
}

double ramsey_signal_conjugated(const DickeState& state, double phi) {
  const auto ops = dicke::build_spin_operators(state.atoms());
  return dicke::expectation(state.amplitudes(), rotated_jz(ops, phi));
}

double ramsey_variance(const DickeState& state, double phi) {
  return std::sqrt(std::max(closed_form(dicke::moments(state), phi).variance, 0.0));
}

double ramsey_variance_rotated(const DickeState& state, double phi) {
  const auto ops = dicke::build_spin_operators(state.atoms());
  return std::sqrt(dicke::variance(state.amplitudes(), rotated_jz(ops, phi)));
}

double sensitivity(const DickeState& state, double phi) {
  return closed_form(dicke::moments(state), phi).slope;
}

PhaseAccuracy phase_accuracy(const DickeState& state, double phi) {
  require(std::isfinite(phi), "phase must be finite");
  return accuracy_from(closed_form(dicke::moments(state), phi), state.spin(), phi);
}

std::vector<SweepRow> ramsey_sweep(const DickeState& state,
                                   std::span<const double> phi_grid) {
  require(!phi_grid.empty(), "ramsey sweep needs a nonempty phase grid");
  const MomentSummary s = dicke::moments(state);
  const double n = state.atoms();

  std::vector<SweepRow> rows;
  rows.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    require(std::isfinite(phi), "phase grid contains a non-finite value");
    const Closed f = closed_form(s, phi);
    const PhaseAccuracy acc = accuracy_from(f, state.spin(), phi);
    SweepRow row;
    row.phi = phi;
    row.signal = f.signal;
    row.excited_fraction = std::clamp((0.5 * n + f.signal) / n, 0.0, 1.0);
    row.deviation = std::sqrt(std::max(f.variance, 0.0));
    row.delta_phi = acc.value;
    row.flagged = !acc.valid;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spinsq::ramsey
