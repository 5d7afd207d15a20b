#include "spinsq/twist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "spinsq/dicke.hpp"
#include "spinsq/error.hpp"

namespace spinsq::twist {

using Complex = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Sparse = Eigen::SparseMatrix<Complex>;

namespace {

void check_grid(std::span<const double> times) {
  require(!times.empty(), "time grid is empty");
  require(times.front() == 0.0, "time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(times[i] >= times[i - 1], "time grid must be sorted");
  }
}

// Tr(rho A) for sparse A.
Complex trace_product(const Dense& rho, const Sparse& a) {
  Complex sum = 0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Sparse::InnerIterator it(a, k); it; ++it) {
      sum += it.value() * rho(it.col(), it.row());
    }
  }
  return sum;
}

struct ModeOperators {
  Sparse a1, a2;
  Sparse number, lx, ly, lz, lx2, ly2, casimir, hamiltonian_unit;
};

ModeOperators build_mode_operators(const FockBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<Complex>> t1, t2;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto [n1, n2] = basis.state(i);
    if (n1 > 0) t1.emplace_back(basis.index(n1 - 1, n2), i, std::sqrt(double(n1)));
    if (n2 > 0) t2.emplace_back(basis.index(n1, n2 - 1), i, std::sqrt(double(n2)));
  }
  ModeOperators ops;
  ops.a1.resize(dim, dim);
  ops.a2.resize(dim, dim);
  ops.a1.setFromTriplets(t1.begin(), t1.end());
  ops.a2.setFromTriplets(t2.begin(), t2.end());

  const Sparse a1d = ops.a1.adjoint();
  const Sparse a2d = ops.a2.adjoint();
  const Sparse lplus = a2d * ops.a1;
  const Sparse lminus = a1d * ops.a2;
  const Complex half(0.5, 0);
  const Complex minus_half_i(0, -0.5);

  ops.number = a1d * ops.a1 + a2d * ops.a2;
  ops.lx = half * (lplus + lminus);
  ops.ly = minus_half_i * (lplus - lminus);
  ops.lz = half * (a2d * ops.a2 - a1d * ops.a1);
  ops.lx2 = ops.lx * ops.lx;
  ops.ly2 = ops.ly * ops.ly;
  ops.casimir = ops.lx2 + ops.ly2 + Sparse(ops.lz * ops.lz);
  ops.hamiltonian_unit = Sparse(ops.lx * ops.ly) + Sparse(ops.ly * ops.lx);
  for (Sparse* m : {&ops.number, &ops.lx, &ops.ly, &ops.lz, &ops.lx2, &ops.ly2,
                    &ops.casimir, &ops.hamiltonian_unit}) {
    m->prune(Complex(0, 0), 1e-15);
  }
  return ops;
}

MomentRow moments_from_density(double t, const Dense& rho, const ModeOperators& ops) {
  MomentRow row;
  row.t = t;
  row.l0 = trace_product(rho, ops.number).real();
  row.lx = trace_product(rho, ops.lx).real();
  row.ly = trace_product(rho, ops.ly).real();
  row.lz = trace_product(rho, ops.lz).real();
  row.dxx = 2.0 * (trace_product(rho, ops.lx2).real() - row.lx * row.lx);
  row.dyy = 2.0 * (trace_product(rho, ops.ly2).real() - row.ly * row.ly);
  row.casimir = trace_product(rho, ops.casimir).real();
  return row;
}

}  // namespace

void TwistParams::validate() const {
  require(atoms >= 1, "atom count must be >= 1");
  require(std::isfinite(chi) && chi >= 0.0, "chi must be finite and >= 0");
  require(std::isfinite(gamma1) && gamma1 >= 0.0, "gamma1 must be >= 0");
  require(std::isfinite(gamma2) && gamma2 >= 0.0, "gamma2 must be >= 0");
}

std::vector<double> MomentTrajectory::times() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.t);
  return out;
}

std::vector<double> MomentTrajectory::dxx() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.dxx);
  return out;
}

MomentTrajectory evolve_unitary(int atoms, double chi, std::span<const double> times) {
  require(atoms >= 2 && atoms % 2 == 0, "unitary evolution needs even N >= 2");
  require(std::isfinite(chi), "chi must be finite");
  check_grid(times);

  const dicke::SpinOperatorSet ops = dicke::build_spin_operators(atoms);
  const Dense h = chi * (ops.jx * ops.jy + ops.jy * ops.jx);
  Eigen::SelfAdjointEigenSolver<Dense> solver(h);
  require(solver.info() == Eigen::Success, "Hamiltonian diagonalization failed");
  const Dense& v = solver.eigenvectors();
  const Eigen::VectorXd& energies = solver.eigenvalues();

  const dicke::Vector psi0 = dicke::bloch_ground_state(atoms).amplitudes();
  const Eigen::VectorXcd coeffs = v.adjoint() * psi0;
  const Dense casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;

  MomentTrajectory traj;
  traj.rows.reserve(times.size());
  for (double t : times) {
    Eigen::VectorXcd phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      phased(k) = std::exp(Complex(0, -energies(k) * t)) * coeffs(k);
    }
    const dicke::Vector psi = v * phased;
    const double norm_drift = std::abs(psi.squaredNorm() - 1.0);
    if (norm_drift > 1e-9) {
      std::ostringstream msg;
      msg << "unitary evolution lost normalization at t=" << t
          << " (|norm^2 - 1| = " << norm_drift << ")";
      fail(ErrorKind::Integrator, msg.str());
    }
    MomentRow row;
    row.t = t;
    row.l0 = atoms;
    row.lx = dicke::expectation(psi, ops.jx);
    row.ly = dicke::expectation(psi, ops.jy);
    row.lz = dicke::expectation(psi, ops.jz);
    row.dxx = 2.0 * dicke::variance(psi, ops.jx);
    row.dyy = 2.0 * dicke::variance(psi, ops.jy);
    row.casimir = dicke::expectation(psi, casimir);
    traj.rows.push_back(row);
  }
  return traj;
}

FockBasis::FockBasis(int n_max) : n_max_(n_max) {
  require(n_max >= 0, "Fock cutoff must be >= 0");
  for (int total = 0; total <= n_max; ++total) {
    for (int n1 = 0; n1 <= total; ++n1) states_.emplace_back(n1, total - n1);
  }
}

std::size_t FockBasis::index(int n1, int n2) const {
  require(n1 >= 0 && n2 >= 0 && n1 + n2 <= n_max_, "Fock state outside basis");
  const int total = n1 + n2;
  return static_cast<std::size_t>(total * (total + 1) / 2 + n1);
}

double TwoModeFockDensity::trace() const { return rho.trace().real(); }

double TwoModeFockDensity::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double TwoModeFockDensity::min_eigenvalue() const {
  const Dense herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Dense> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

MasterRun evolve_master(const TwistParams& params, std::span<const double> times,
                        const ode::Tolerance& tolerance) {
  params.validate();
  check_grid(times);
  if (params.atoms > kMaxMasterAtoms) {
    fail(ErrorKind::Resource,
         "master equation limited to N <= " + std::to_string(kMaxMasterAtoms) +
             " (basis dimension (N+1)(N+2)/2), got N = " +
             std::to_string(params.atoms));
  }

  const FockBasis basis(params.atoms);
  const ModeOperators ops = build_mode_operators(basis);
  const auto dim = static_cast<Eigen::Index>(basis.size());

  const Sparse hamiltonian = Complex(params.chi, 0) * ops.hamiltonian_unit;
  std::vector<Sparse> jumps;
  if (params.gamma1 > 0) jumps.push_back(Complex(std::sqrt(2 * params.gamma1), 0) * ops.a1);
  if (params.gamma2 > 0) jumps.push_back(Complex(std::sqrt(2 * params.gamma2), 0) * ops.a2);

  // rho' = -i(Heff rho - rho Heff^dag) + sum L rho L^dag,
  // Heff = H - (i/2) sum L^dag L.
  Sparse heff = hamiltonian;
  for (const Sparse& l : jumps) {
    heff += Complex(0, -0.5) * Sparse(l.adjoint() * l);
  }
  std::vector<Sparse> jumps_adj;
  for (const Sparse& l : jumps) jumps_adj.emplace_back(l.adjoint());

  const Complex minus_i(0, -1);
  auto rhs = [&](double, const Dense& rho) -> Dense {
    const Dense left = minus_i * (heff * rho);
    Dense out = left + left.adjoint();
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      out += Dense(jumps[k] * rho) * jumps_adj[k];
    }
    return out;
  };

  Dense rho0 = Dense::Zero(dim, dim);
  const auto start = static_cast<Eigen::Index>(basis.index(params.atoms, 0));
  rho0(start, start) = 1.0;

  MasterRun run{MomentTrajectory{}, TwoModeFockDensity{basis, rho0}, MasterDiagnostics{}};
  run.diagnostics.min_population = 1.0;
  run.diagnostics.min_eigenvalue = 1.0;
  run.trajectory.rows.reserve(times.size());

  auto observe = [&](double t, const Dense& rho) {
    TwoModeFockDensity snapshot{basis, rho};
    const double trace_drift = std::abs(snapshot.trace() - 1.0);
    const double herm = snapshot.hermiticity_error();
    const double min_pop = rho.diagonal().real().minCoeff();
    const double min_eig = snapshot.min_eigenvalue();
    auto& d = run.diagnostics;
    d.max_trace_drift = std::max(d.max_trace_drift, trace_drift);
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, herm);
    d.min_population = std::min(d.min_population, min_pop);
    d.min_eigenvalue = std::min(d.min_eigenvalue, min_eig);
    if (trace_drift > 1e-8 || herm > 1e-10 || min_eig < -1e-8 || min_pop < -1e-9) {
      std::ostringstream msg;
      msg << "density matrix left the physical set at t=" << t
          << " (trace drift " << trace_drift << ", hermiticity " << herm
          << ", min eigenvalue " << min_eig << ", min population " << min_pop << ")";
      fail(ErrorKind::Physicality, msg.str());
    }
    run.trajectory.rows.push_back(moments_from_density(t, rho, ops));
    run.final_state.rho = rho;
  };

  run.diagnostics.stats = ode::integrate<Dense>(rhs, rho0, times, tolerance, observe);
  return run;
}

MinVariance find_min_variance(const MomentTrajectory& trajectory) {
  const auto& rows = trajectory.rows;
  require(rows.size() >= 3, "trajectory too short to locate a minimum");
  const double atoms = rows.front().l0;
  require(atoms > 0, "trajectory has no atoms at t=0");

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].dxx < rows[best].dxx) best = i;
  }
  if (best == 0 || best + 1 == rows.size()) {
    fail(ErrorKind::NoInteriorMinimum,
         "Dxx has no interior minimum on the grid (minimum at index " +
             std::to_string(best) + " of " + std::to_string(rows.size()) + ")");
  }

  const double x0 = rows[best - 1].t, x1 = rows[best].t, x2 = rows[best + 1].t;
  const double y0 = rows[best - 1].dxx, y1 = rows[best].dxx, y2 = rows[best + 1].dxx;
  MinVariance out{x1, y1 / atoms, best};
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  if (denom == 0.0) return out;
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (a <= 0.0) return out;
  const double c = y0 - a * x0 * x0 - b * x0;
  const double vertex = -b / (2 * a);
  if (vertex < x0 || vertex > x2) return out;
  out.t_star = vertex;
  out.delta_xx_min = (c - b * b / (4 * a)) / atoms;
  return out;
}

}  // namespace spinsq::twist
