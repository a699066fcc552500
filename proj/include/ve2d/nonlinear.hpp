#pragma once

// Spectral-space building blocks shared by the time stepper and the
// vector-field machinery: the unknowns (V, H1, H2) as spectra, their
// physical gradients, and the linear and quadratic parts of the potential
// system.

#include <array>

#include "ve2d/field.hpp"
#include "ve2d/state.hpp"

namespace ve2d {

struct SpectralU {
  Spectrum V;
  std::array<Spectrum, 2> H;

  explicit SpectralU(const Grid& grid);
  SpectralU(Spectrum v, Spectrum h1, Spectrum h2);
  static SpectralU from_state(const PotentialState& s);

  const Grid& grid() const noexcept { return V.grid(); }
  SpectralU& operator+=(const SpectralU& o);
  SpectralU& operator*=(double s);
  SpectralU& axpy(double s, const SpectralU& o);
};

/// Physical first derivatives of (V, H1, H2): dV[l] = d_{l+1} V and
/// dH[m][l] = d_{l+1} H_{m+1}.
struct Gradients {
  std::array<ScalarField, 2> dV;
  std::array<std::array<ScalarField, 2>, 2> dH;

  explicit Gradients(const SpectralU& u);
};

struct TermSwitches {
  bool coupling = true;   ///< div H in the V equation, grad V in the H equation
  bool nonlinear = true;
  bool dealias = true;
};

/// mu lap W_V + div W_H and grad W_V, subject to the switches.
SpectralU linear_part(const SpectralU& w, double mu, bool viscous, const TermSwitches& sw);

/// The quadratic form Q(A, B) of the potential system:
///   V: sum_ij R_i^perp R_j (-gp_i A_V gp_j B_V + gp_i A_H . gp_j B_H)
///   H_j: sum_l gp_l A_{H_j} d_l B_V
/// with gp = grad-perp. Q(U, U) is the full nonlinearity. Products are
/// dealiased when requested.
SpectralU quadratic_form(const Gradients& a, const Gradients& b, bool dealias);

/// Spectrum of the pointwise product a*b, dealiased on request.
Spectrum product_spectrum(const ScalarField& a, const ScalarField& b, bool dealias);

}  // namespace ve2d
