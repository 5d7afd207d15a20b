#pragma once

// Ramsey interferometry with a pi/2 pulse about x, free precession by phi
// about z, and a -pi/2 pulse about x. The detected observable is
// Jz(phi) = U^dag Jz U = Jz cos(phi) - Jx sin(phi).

#include <span>
#include <string>
#include <vector>

#include "spinsq/dicke.hpp"

namespace spinsq::ramsey {

/// U(phi) = exp(i pi/2 Jx) exp(-i phi Jz) exp(-i pi/2 Jx).
dicke::Matrix ramsey_unitary(int atoms, double phi);

/// <Jz(phi)> from the closed form <Jz> cos(phi) - <Jx> sin(phi).
double ramsey_signal(const dicke::DickeState& state, double phi);

/// <Jz(phi)> by explicitly conjugating Jz with ramsey_unitary.
double ramsey_signal_conjugated(const dicke::DickeState& state, double phi);

/// Delta Jz(phi) (standard deviation) from the cos^2 / sin^2 / cross-term
/// closed form.
double ramsey_variance(const dicke::DickeState& state, double phi);

/// Delta Jz(phi) as the direct quadratic form of the rotated operator.
double ramsey_variance_rotated(const dicke::DickeState& state, double phi);

/// d<Jz(phi)>/dphi = -<Jz> sin(phi) - <Jx> cos(phi), analytic.
double sensitivity(const dicke::DickeState& state, double phi);

/// Phase accuracy delta phi = Delta Jz(phi) / |d<Jz(phi)>/dphi|. At a
/// sensitivity zero `valid` is false, `value` is NaN and `diagnostic` says
/// why.
struct PhaseAccuracy {
  double value = 0;
  bool valid = true;
  std::string diagnostic;
};

PhaseAccuracy phase_accuracy(const dicke::DickeState& state, double phi);

struct SweepRow {
  double phi = 0;
  double excited_fraction = 0;  // N_e / N = (N/2 + <Jz(phi)>) / N
  double signal = 0;            // <Jz(phi)>
  double deviation = 0;         // Delta Jz(phi)
  double delta_phi = 0;         // NaN when flagged
  bool flagged = false;         // sensitivity zero
};

/// One row per grid point, in grid order. Rows at sensitivity zeros are
/// kept and flagged. Throws InvalidParameter on an empty grid.
std::vector<SweepRow> ramsey_sweep(const dicke::DickeState& state,
                                   std::span<const double> phi_grid);

}  // namespace spinsq::ramsey
