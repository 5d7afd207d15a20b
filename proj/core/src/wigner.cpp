#include "spinsq/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "spinsq/error.hpp"

namespace spinsq::wigner {

namespace mp = boost::multiprecision;
using Complex = std::complex<double>;

namespace {

// Doubled quantum numbers, so half-integers become integers.
struct Doubled {
  int j1, j2, j3, m1, m2, m3;
};

int to_doubled(double x, const char* name) {
  const double twice = 2.0 * x;
  const double rounded = std::round(twice);
  require(std::isfinite(x) && std::abs(twice - rounded) < 1e-9,
          std::string(name) + " must be an integer or half-integer");
  return static_cast<int>(rounded);
}

Doubled parse(double j1, double j2, double j3, double m1, double m2, double m3) {
  Doubled d{to_doubled(j1, "j1"), to_doubled(j2, "j2"), to_doubled(j3, "j3"),
            to_doubled(m1, "m1"), to_doubled(m2, "m2"), to_doubled(m3, "m3")};
  const int js[] = {d.j1, d.j2, d.j3};
  const int ms[] = {d.m1, d.m2, d.m3};
  for (int i = 0; i < 3; ++i) {
    require(js[i] >= 0, "j must be >= 0");
    require(std::abs(ms[i]) <= js[i], "|m| must not exceed j");
    require((js[i] + ms[i]) % 2 == 0, "j + m must be an integer");
  }
  return d;
}

bool selection_rules(const Doubled& d) {
  if (d.m1 + d.m2 + d.m3 != 0) return false;
  if (d.j3 > d.j1 + d.j2 || d.j3 < std::abs(d.j1 - d.j2)) return false;
  return (d.j1 + d.j2 + d.j3) % 2 == 0;
}

// Integer arguments of the Racah sum (all doubled values halved).
struct RacahTerms {
  int a1, a2, a3;           // triangle factorials
  int a4;                   // j1 + j2 + j3 + 1
  int f[6];                 // (j1 +- m1)!, (j2 +- m2)!, (j3 +- m3)!
  int k_min, k_max;
  int b1, b2, b3, b4, b5;   // k-dependent factorial offsets
  bool negative_phase;
};

RacahTerms racah_terms(const Doubled& d) {
  RacahTerms r;
  r.a1 = (d.j1 + d.j2 - d.j3) / 2;
  r.a2 = (d.j1 - d.j2 + d.j3) / 2;
  r.a3 = (-d.j1 + d.j2 + d.j3) / 2;
  r.a4 = (d.j1 + d.j2 + d.j3) / 2 + 1;
  r.f[0] = (d.j1 + d.m1) / 2;
  r.f[1] = (d.j1 - d.m1) / 2;
  r.f[2] = (d.j2 + d.m2) / 2;
  r.f[3] = (d.j2 - d.m2) / 2;
  r.f[4] = (d.j3 + d.m3) / 2;
  r.f[5] = (d.j3 - d.m3) / 2;
  // k!, (j3 - j2 + k + m1)!, (j3 - j1 + k - m2)!, (j1 + j2 - j3 - k)!,
  // (j1 - k - m1)!, (j2 - k + m2)!
  r.b1 = (d.j3 - d.j2 + d.m1) / 2;
  r.b2 = (d.j3 - d.j1 - d.m2) / 2;
  r.b3 = r.a1;
  r.b4 = (d.j1 - d.m1) / 2;
  r.b5 = (d.j2 + d.m2) / 2;
  r.k_min = std::max({0, -r.b1, -r.b2});
  r.k_max = std::min({r.b3, r.b4, r.b5});
  r.negative_phase = (((d.j1 - d.j2 - d.m3) / 2) % 2) != 0;
  return r;
}

const mp::cpp_int& factorial(int n) {
  static const std::vector<mp::cpp_int> table = [] {
    std::vector<mp::cpp_int> t(4 * kExactThreeJLimit + 2);
    t[0] = 1;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<unsigned>(i);
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

double exact_3j(const Doubled& d) {
  const RacahTerms r = racah_terms(d);
  mp::cpp_rational sum = 0;
  for (int k = r.k_min; k <= r.k_max; ++k) {
    const mp::cpp_int denom = factorial(k) * factorial(r.b1 + k) * factorial(r.b2 + k) *
                              factorial(r.b3 - k) * factorial(r.b4 - k) * factorial(r.b5 - k);
    const mp::cpp_rational term(mp::cpp_int(1), denom);
    if (k % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  if (sum == 0) return 0.0;
  mp::cpp_int numer = factorial(r.a1) * factorial(r.a2) * factorial(r.a3);
  for (int i = 0; i < 6; ++i) numer *= factorial(r.f[i]);
  const mp::cpp_rational squared = mp::cpp_rational(numer, factorial(r.a4)) * sum * sum;
  using Float = mp::cpp_bin_float_50;
  const Float magnitude = mp::sqrt(Float(squared));
  const bool negative = (sum < 0) != r.negative_phase;
  const double value = magnitude.convert_to<double>();
  return negative ? -value : value;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double float_3j(const Doubled& d) {
  const RacahTerms r = racah_terms(d);
  double prefactor = log_factorial(r.a1) + log_factorial(r.a2) + log_factorial(r.a3) -
                     log_factorial(r.a4);
  for (int i = 0; i < 6; ++i) prefactor += log_factorial(r.f[i]);
  prefactor *= 0.5;
  double sum = 0.0;
  for (int k = r.k_min; k <= r.k_max; ++k) {
    const double log_term = prefactor - log_factorial(k) - log_factorial(r.b1 + k) -
                            log_factorial(r.b2 + k) - log_factorial(r.b3 - k) -
                            log_factorial(r.b4 - k) - log_factorial(r.b5 - k);
    sum += (k % 2 == 0 ? 1.0 : -1.0) * std::exp(log_term);
  }
  return r.negative_phase ? -sum : sum;
}

double threej_doubled(const Doubled& d) {
  if (!selection_rules(d)) return 0.0;
  const int j_max = std::max({d.j1, d.j2, d.j3});
  return j_max <= 2 * kExactThreeJLimit ? exact_3j(d) : float_3j(d);
}

void check_density(const Eigen::MatrixXcd& rho) {
  require(rho.rows() == rho.cols() && rho.rows() >= 1, "density matrix must be square");
  require(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-10, "density matrix must have unit trace");
  require((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10, "density matrix must be Hermitian");
}

}  // namespace

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  return threej_doubled(parse(j1, j2, j3, m1, m2, m3));
}

double wigner3j_float(double j1, double j2, double j3, double m1, double m2, double m3) {
  const Doubled d = parse(j1, j2, j3, m1, m2, m3);
  return selection_rules(d) ? float_3j(d) : 0.0;
}

const std::vector<MultipoleOperator>& multipole_operators(int two_j) {
  require(two_j >= 0, "spin must be >= 0");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const std::vector<MultipoleOperator>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[two_j];
  if (slot) return *slot;

  auto ops = std::make_unique<std::vector<MultipoleOperator>>();
  const int dim = two_j + 1;
  ops->reserve(static_cast<std::size_t>(dim * dim));
  for (int k = 0; k <= two_j; ++k) {
    const double norm = std::sqrt(2.0 * k + 1.0);
    for (int q = -k; q <= k; ++q) {
      MultipoleOperator op{k, q, {}};
      const int first_col = std::max(0, -q);
      const int last_col = std::min(dim - 1, dim - 1 - q);
      for (int col = first_col; col <= last_col; ++col) {
        const int row = col + q;
        // Doubled m = 2 * index - 2J.
        const int two_m = 2 * row - two_j;
        const int two_mp = 2 * col - two_j;
        const double sign = (((two_j - two_m) / 2) % 2 == 0) ? 1.0 : -1.0;
        const Doubled d{two_j, 2 * k, two_j, -two_m, 2 * q, two_mp};
        op.values.push_back(sign * norm * threej_doubled(d));
      }
      ops->push_back(std::move(op));
    }
  }
  slot = std::move(ops);
  return *slot;
}

Eigen::MatrixXcd multipole_matrix(int two_j, int k, int q) {
  require(k >= 0 && k <= two_j && std::abs(q) <= k, "multipole index out of range");
  const auto& op = multipole_operators(two_j)[MultipoleDecomposition::index(k, q)];
  const int dim = two_j + 1;
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  const int first_col = std::max(0, -q);
  for (std::size_t i = 0; i < op.values.size(); ++i) {
    const int col = first_col + static_cast<int>(i);
    t(col + q, col) = op.values[i];
  }
  return t;
}

MultipoleDecomposition multipole_coeffs(const Eigen::MatrixXcd& rho) {
  check_density(rho);
  const int dim = static_cast<int>(rho.rows());
  const int two_j = dim - 1;
  const auto& ops = multipole_operators(two_j);
  MultipoleDecomposition out{two_j, std::vector<Complex>(ops.size())};
  for (std::size_t idx = 0; idx < ops.size(); ++idx) {
    const auto& op = ops[idx];
    const int first_col = std::max(0, -op.q);
    Complex sum = 0;
    // Tr[rho T^dag] = sum rho(row, col) conj(T(row, col)), T real.
    for (std::size_t i = 0; i < op.values.size(); ++i) {
      const int col = first_col + static_cast<int>(i);
      sum += rho(col + op.q, col) * op.values[i];
    }
    out.coeffs[idx] = sum;
  }
  return out;
}

MultipoleDecomposition multipole_coeffs(const dicke::DickeState& state) {
  const dicke::Vector& psi = state.amplitudes();
  return multipole_coeffs(Eigen::MatrixXcd(psi * psi.adjoint()));
}

Eigen::MatrixXcd reconstruct(const MultipoleDecomposition& decomposition) {
  const int dim = decomposition.two_j + 1;
  const auto& ops = multipole_operators(decomposition.two_j);
  require(decomposition.coeffs.size() == ops.size(), "coefficient count does not match spin");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t idx = 0; idx < ops.size(); ++idx) {
    const auto& op = ops[idx];
    const int first_col = std::max(0, -op.q);
    for (std::size_t i = 0; i < op.values.size(); ++i) {
      const int col = first_col + static_cast<int>(i);
      rho(col + op.q, col) += decomposition.coeffs[idx] * op.values[i];
    }
  }
  return rho;
}

std::complex<double> spherical_harmonic(int k, int q, double theta, double phi) {
  require(k >= 0 && std::abs(q) <= k, "spherical harmonic needs k >= 0 and |q| <= k");
  const int aq = std::abs(q);
  // std::sph_legendre includes the Condon-Shortley phase.
  const double legendre = std::sph_legendre(static_cast<unsigned>(k), static_cast<unsigned>(aq), theta);
  const Complex positive = legendre * std::polar(1.0, aq * phi);
  if (q >= 0) return positive;
  return (aq % 2 == 0 ? 1.0 : -1.0) * std::conj(positive);
}

SphericalGrid wigner_map(const MultipoleDecomposition& decomposition,
                         std::span<const double> thetas, std::span<const double> phis,
                         int jobs) {
  require(!thetas.empty() && !phis.empty(), "wigner map needs nonempty grids");
  require(jobs >= 1, "jobs must be >= 1");
  const int kmax = decomposition.max_rank();
  require(decomposition.coeffs.size() ==
              MultipoleDecomposition::index(kmax, kmax) + 1,
          "coefficient count does not match spin");

  SphericalGrid grid;
  grid.thetas.assign(thetas.begin(), thetas.end());
  grid.phis.assign(phis.begin(), phis.end());
  const auto n_theta = static_cast<Eigen::Index>(thetas.size());
  const auto n_phi = static_cast<Eigen::Index>(phis.size());
  grid.values.resize(n_theta, n_phi);

  // exp(i q phi) for q = 0..kmax, per phi.
  Eigen::MatrixXcd phases(kmax + 1, n_phi);
  for (Eigen::Index j = 0; j < n_phi; ++j) {
    for (int q = 0; q <= kmax; ++q) phases(q, j) = std::polar(1.0, q * phis[j]);
  }

  std::vector<double> row_imag(static_cast<std::size_t>(n_theta), 0.0);
  auto fill_row = [&](Eigen::Index i) {
    // Legendre factors for q >= 0.
    std::vector<double> legendre(MultipoleDecomposition::index(kmax, kmax) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
      for (int q = 0; q <= k; ++q) {
        legendre[MultipoleDecomposition::index(k, q)] =
            std::sph_legendre(static_cast<unsigned>(k), static_cast<unsigned>(q), thetas[i]);
      }
    }
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n_phi; ++j) {
      Complex w = 0;
      for (int k = 0; k <= kmax; ++k) {
        for (int q = 0; q <= k; ++q) {
          const Complex y = legendre[MultipoleDecomposition::index(k, q)] * phases(q, j);
          w += y * decomposition.at(k, q);
          if (q > 0) {
            const Complex y_neg = (q % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
            w += y_neg * decomposition.at(k, -q);
          }
        }
      }
      grid.values(i, j) = w.real();
      worst = std::max(worst, std::abs(w.imag()));
    }
    row_imag[static_cast<std::size_t>(i)] = worst;
  };

  const int workers = std::min<int>(jobs, static_cast<int>(n_theta));
  if (workers <= 1) {
    for (Eigen::Index i = 0; i < n_theta; ++i) fill_row(i);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (Eigen::Index i = w; i < n_theta; i += workers) fill_row(i);
      });
    }
  }
  grid.max_imaginary = *std::max_element(row_imag.begin(), row_imag.end());
  return grid;
}

GaussLegendre gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre needs n >= 1");
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const auto un = static_cast<unsigned>(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = std::legendre(un, x);
      const double p_prev = n > 1 ? std::legendre(un - 1, x) : 1.0;
      derivative = n * (x * p - p_prev) / (x * x - 1.0);
      const double step = p / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double p = std::legendre(un, x);
    const double p_prev = n > 1 ? std::legendre(un - 1, x) : 1.0;
    derivative = n * (x * p - p_prev) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

double sphere_integral(const MultipoleDecomposition& decomposition, int n_theta, int n_phi) {
  require(n_phi >= 1, "n_phi must be >= 1");
  const GaussLegendre rule = gauss_legendre(n_theta);
  std::vector<double> thetas(rule.nodes.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) thetas[i] = std::acos(rule.nodes[i]);
  std::vector<double> phis(static_cast<std::size_t>(n_phi));
  for (int j = 0; j < n_phi; ++j) phis[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n_phi;
  const SphericalGrid grid = wigner_map(decomposition, thetas, phis);
  double total = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    total += rule.weights[i] * grid.values.row(static_cast<Eigen::Index>(i)).sum();
  }
  return total * 2.0 * std::numbers::pi / n_phi;
}

dicke::DickeState rotate_z(const dicke::DickeState& state, double alpha) {
  require(std::isfinite(alpha), "rotation angle must be finite");
  dicke::Vector psi = state.amplitudes();
  const double j = state.spin();
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    psi(i) *= std::polar(1.0, -alpha * (static_cast<double>(i) - j));
  }
  return dicke::DickeState(state.atoms(), std::move(psi));
}

}  // namespace spinsq::wigner
