#pragma once

#include "ve2d/fft.hpp"
#include "ve2d/field.hpp"

namespace ve2d {

/// Multiply every half-spectrum coefficient by symbol(k1, k2, nyquist1,
/// nyquist2). The Nyquist flags mark m1 = -n/2 and m2 = n/2; symbols odd in
/// a direction must vanish there to keep the field real.
template <class Symbol>
Spectrum apply_symbol(const Spectrum& s, Symbol&& symbol) {
  const Grid& g = s.grid();
  const int n = g.n();
  Spectrum out(g);
  for (int p1 = 0; p1 < n; ++p1) {
    const int m1 = g.mode(p1);
    const double k1 = g.wavenumber(m1);
    const bool nyq1 = (m1 == -n / 2);
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      out(p1, p2) = s(p1, p2) * symbol(k1, k2, nyq1, p2 == n / 2);
    }
  }
  return out;
}

// Spectral-side operators. Axis and component indices are 1 or 2.
Spectrum derivative(const Spectrum& f, int axis);
/// Component i of grad-perp = (-d2, d1).
Spectrum perp_derivative(const Spectrum& f, int i);
Spectrum laplacian(const Spectrum& f);
/// Division by -|k|^2 with the k = 0 coefficient set to zero.
Spectrum inverse_laplacian(const Spectrum& f);
/// The zero-order multiplier k_i^perp k_j / |k|^2, k^perp = (-k2, k1).
Spectrum riesz_pp(int i, int j, const Spectrum& f);
/// Zero every mode with max(|m1|, |m2|) > n/3.
Spectrum dealias(const Spectrum& f);
void dealias_in_place(Spectrum& f);
/// Remove the mean (k = 0) coefficient.
Spectrum zero_mean(const Spectrum& f);

// Physical-side conveniences: transform, apply, transform back.
ScalarField derivative(const ScalarField& f, int axis);
ScalarField perp_derivative(const ScalarField& f, int i);
ScalarField laplacian(const ScalarField& f);
ScalarField inverse_laplacian(const ScalarField& f);
ScalarField riesz_pp(int i, int j, const ScalarField& f);
ScalarField dealias(const ScalarField& f);

VectorField2 gradient(const ScalarField& f);
VectorField2 perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField2& v);
/// grad-perp . v = -d2 v1 + d1 v2
ScalarField perp_divergence(const VectorField2& v);

/// Divergence-free projection v - grad lap^{-1} div v; the mean is kept.
VectorField2 leray_project(const VectorField2& v);

}  // namespace ve2d
