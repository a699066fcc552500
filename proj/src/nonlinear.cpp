#include "ve2d/nonlinear.hpp"

#include "ve2d/fft.hpp"
#include "ve2d/spectral.hpp"

namespace ve2d {

SpectralU::SpectralU(const Grid& grid) : V(grid), H{Spectrum(grid), Spectrum(grid)} {}

SpectralU::SpectralU(Spectrum v, Spectrum h1, Spectrum h2)
    : V(std::move(v)), H{std::move(h1), std::move(h2)} {}

SpectralU SpectralU::from_state(const PotentialState& s) {
  return SpectralU(to_spectral(s.V), to_spectral(s.H[0]), to_spectral(s.H[1]));
}

SpectralU& SpectralU::operator+=(const SpectralU& o) {
  V += o.V;
  H[0] += o.H[0];
  H[1] += o.H[1];
  return *this;
}

SpectralU& SpectralU::operator*=(double s) {
  V *= s;
  H[0] *= s;
  H[1] *= s;
  return *this;
}

SpectralU& SpectralU::axpy(double s, const SpectralU& o) {
  V.axpy(s, o.V);
  H[0].axpy(s, o.H[0]);
  H[1].axpy(s, o.H[1]);
  return *this;
}

Gradients::Gradients(const SpectralU& u)
    : dV{to_physical(derivative(u.V, 1)), to_physical(derivative(u.V, 2))},
      dH{{{to_physical(derivative(u.H[0], 1)), to_physical(derivative(u.H[0], 2))},
          {to_physical(derivative(u.H[1], 1)), to_physical(derivative(u.H[1], 2))}}} {}

SpectralU linear_part(const SpectralU& w, double mu, bool viscous, const TermSwitches& sw) {
  const Grid& g = w.grid();
  SpectralU out(g);
  const int n = g.n();
  const bool visc = viscous && mu != 0.0;
  const Complex I{0.0, 1.0};
  for (int p1 = 0; p1 < n; ++p1) {
    const int m1 = g.mode(p1);
    const double k1 = g.wavenumber(m1);
    const double q1 = (m1 == -n / 2) ? 0.0 : k1;
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      const double q2 = (p2 == n / 2) ? 0.0 : k2;
      const std::size_t idx = g.spectral_index(p1, p2);
      Complex dv{};
      if (visc) dv -= mu * (k1 * k1 + k2 * k2) * w.V.data()[idx];
      if (sw.coupling) {
        dv += I * (q1 * w.H[0].data()[idx] + q2 * w.H[1].data()[idx]);
        out.H[0].data()[idx] = I * q1 * w.V.data()[idx];
        out.H[1].data()[idx] = I * q2 * w.V.data()[idx];
      }
      out.V.data()[idx] = dv;
    }
  }
  return out;
}

Spectrum product_spectrum(const ScalarField& a, const ScalarField& b, bool dealias) {
  Spectrum s = to_spectral(multiply(a, b));
  if (dealias) dealias_in_place(s);
  return s;
}

SpectralU quadratic_form(const Gradients& a, const Gradients& b, bool dealias) {
  const Grid& g = a.dV[0].grid();
  const std::size_t size = g.size();

  // gp_1 f = -d2 f, gp_2 f = d1 f.
  auto gp = [](const std::array<ScalarField, 2>& d, int i, std::size_t k) {
    return i == 0 ? -d[1][k] : d[0][k];
  };

  // P_ij = -gp_i A_V gp_j B_V + sum_m gp_i A_Hm gp_j B_Hm
  std::array<Spectrum, 4> p_hat{Spectrum(g), Spectrum(g), Spectrum(g), Spectrum(g)};
  ScalarField prod(g);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < size; ++k) {
        double acc = -gp(a.dV, i, k) * gp(b.dV, j, k);
        for (int m = 0; m < 2; ++m) acc += gp(a.dH[m], i, k) * gp(b.dH[m], j, k);
        prod[k] = acc;
      }
      p_hat[2 * i + j] = to_spectral(prod);
      if (dealias) dealias_in_place(p_hat[2 * i + j]);
    }
  }

  SpectralU out(g);
  const int n = g.n();
  for (int p1 = 0; p1 < n; ++p1) {
    const int m1 = g.mode(p1);
    const double k1 = g.wavenumber(m1);
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0 || m1 == -n / 2 || p2 == n / 2) continue;
      const double kperp[2] = {-k2, k1};
      const double kvec[2] = {k1, k2};
      const std::size_t idx = g.spectral_index(p1, p2);
      Complex acc{};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) acc += (kperp[i] * kvec[j] / kk) * p_hat[2 * i + j].data()[idx];
      }
      out.V.data()[idx] = acc;
    }
  }

  for (int m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < size; ++k) {
      prod[k] = gp(a.dH[m], 0, k) * b.dV[0][k] + gp(a.dH[m], 1, k) * b.dV[1][k];
    }
    out.H[m] = to_spectral(prod);
    if (dealias) dealias_in_place(out.H[m]);
  }
  return out;
}

}  // namespace ve2d
