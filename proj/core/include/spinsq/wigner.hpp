#pragma once

// Spin Wigner functions from the multipole expansion
//   rho = sum_kq rho_kq T_kq,  rho_kq = Tr[rho T_kq^dag],
//   W(theta, phi) = sum_kq Y_k^q(theta, phi) rho_kq,
// with T_kq = sum (-1)^(J-m) sqrt(2k+1) (J k J; -m q m') |m><m'| and
// Condon-Shortley spherical harmonics.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinsq/dicke.hpp"

namespace spinsq::wigner {

/// Wigner 3j symbol. Arguments must be integers or half-integers with
/// |m_i| <= j_i and j_i + m_i integral (InvalidParameter otherwise). Returns
/// 0 off the selection rules. Exact rational Racah sum for max j <= 50,
/// log-gamma double sum above.
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// Same symbol through the double-precision log-gamma sum at any j.
/// Cancellation makes it inaccurate for j beyond a few tens.
double wigner3j_float(double j1, double j2, double j3, double m1, double m2, double m3);

inline constexpr int kExactThreeJLimit = 50;

struct MultipoleDecomposition {
  int two_j = 0;
  std::vector<std::complex<double>> coeffs;  // index k*k + (q + k)

  double spin() const noexcept { return 0.5 * two_j; }
  int max_rank() const noexcept { return two_j; }
  static std::size_t index(int k, int q) { return static_cast<std::size_t>(k * k + q + k); }
  std::complex<double> at(int k, int q) const { return coeffs.at(index(k, q)); }
};

/// Nonzero entries of T_kq: T_kq(m' + q, m') = values[m' + J] (Dicke indices)
/// for m' running over the entries where m' + q stays in range.
struct MultipoleOperator {
  int k = 0;
  int q = 0;
  std::vector<double> values;  // length 2J + 1 - |q|, starting at row max(q, 0)
};

/// All T_kq for spin two_j / 2, cached per spin (thread-safe).
const std::vector<MultipoleOperator>& multipole_operators(int two_j);

/// Dense T_kq, for tests.
Eigen::MatrixXcd multipole_matrix(int two_j, int k, int q);

/// Density matrices must have unit trace and be Hermitian within 1e-10.
MultipoleDecomposition multipole_coeffs(const Eigen::MatrixXcd& rho);
MultipoleDecomposition multipole_coeffs(const dicke::DickeState& state);

/// sum rho_kq T_kq.
Eigen::MatrixXcd reconstruct(const MultipoleDecomposition& decomposition);

std::complex<double> spherical_harmonic(int k, int q, double theta, double phi);

struct SphericalGrid {
  std::vector<double> thetas;
  std::vector<double> phis;
  Eigen::MatrixXd values;  // (theta, phi)
  double max_imaginary = 0;
};

/// Evaluates W on the product grid; rows are split over `jobs` threads.
SphericalGrid wigner_map(const MultipoleDecomposition& decomposition,
                         std::span<const double> thetas, std::span<const double> phis,
                         int jobs = 1);

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule on [-1, 1].
GaussLegendre gauss_legendre(int n);

/// Gauss-Legendre in cos(theta) times trapezoid in phi.
double sphere_integral(const MultipoleDecomposition& decomposition, int n_theta = 64,
                       int n_phi = 128);

/// Diagonal z rotation |m> -> exp(-i alpha m)|m>.
dicke::DickeState rotate_z(const dicke::DickeState& state, double alpha);

}  // namespace spinsq::wigner
