#include "ve2d/spectral.hpp"

#include <cstdlib>

#include "ve2d/error.hpp"

namespace ve2d {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_axis(int axis) {
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
}

}  // namespace

Spectrum derivative(const Spectrum& f, int axis) {
  check_axis(axis);
  if (axis == 1) {
    return apply_symbol(f, [](double k1, double, bool nyq1, bool) {
      return nyq1 ? Complex{} : kI * k1;
    });
  }
  return apply_symbol(f, [](double, double k2, bool, bool nyq2) {
    return nyq2 ? Complex{} : kI * k2;
  });
}

Spectrum perp_derivative(const Spectrum& f, int i) {
  check_axis(i);
  if (i == 1) {
    return apply_symbol(f, [](double, double k2, bool, bool nyq2) {
      return nyq2 ? Complex{} : -kI * k2;
    });
  }
  return derivative(f, 1);
}

Spectrum laplacian(const Spectrum& f) {
  return apply_symbol(f, [](double k1, double k2, bool, bool) {
    return Complex{-(k1 * k1 + k2 * k2), 0.0};
  });
}

Spectrum inverse_laplacian(const Spectrum& f) {
  return apply_symbol(f, [](double k1, double k2, bool, bool) {
    const double kk = k1 * k1 + k2 * k2;
    return kk == 0.0 ? Complex{} : Complex{-1.0 / kk, 0.0};
  });
}

Spectrum riesz_pp(int i, int j, const Spectrum& f) {
  check_axis(i);
  check_axis(j);
  return apply_symbol(f, [i, j](double k1, double k2, bool nyq1, bool nyq2) {
    const double kk = k1 * k1 + k2 * k2;
    if (kk == 0.0 || nyq1 || nyq2) return Complex{};
    const double kperp_i = (i == 1) ? -k2 : k1;
    const double k_j = (j == 1) ? k1 : k2;
    return Complex{kperp_i * k_j / kk, 0.0};
  });
}

void dealias_in_place(Spectrum& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  for (int p1 = 0; p1 < n; ++p1) {
    const bool cut1 = 3 * std::abs(g.mode(p1)) > n;
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      if (cut1 || 3 * p2 > n) f(p1, p2) = Complex{};
    }
  }
}

Spectrum dealias(const Spectrum& f) {
  Spectrum out = f;
  dealias_in_place(out);
  return out;
}

Spectrum zero_mean(const Spectrum& f) {
  Spectrum out = f;
  out(0, 0) = Complex{};
  return out;
}

ScalarField derivative(const ScalarField& f, int axis) {
  return to_physical(derivative(to_spectral(f), axis));
}

ScalarField perp_derivative(const ScalarField& f, int i) {
  return to_physical(perp_derivative(to_spectral(f), i));
}

ScalarField laplacian(const ScalarField& f) { return to_physical(laplacian(to_spectral(f))); }

ScalarField inverse_laplacian(const ScalarField& f) {
  return to_physical(inverse_laplacian(to_spectral(f)));
}

ScalarField riesz_pp(int i, int j, const ScalarField& f) {
  return to_physical(riesz_pp(i, j, to_spectral(f)));
}

ScalarField dealias(const ScalarField& f) { return to_physical(dealias(to_spectral(f))); }

VectorField2 gradient(const ScalarField& f) {
  const Spectrum s = to_spectral(f);
  return {to_physical(derivative(s, 1)), to_physical(derivative(s, 2))};
}

VectorField2 perp_gradient(const ScalarField& f) {
  const Spectrum s = to_spectral(f);
  return {to_physical(perp_derivative(s, 1)), to_physical(perp_derivative(s, 2))};
}

ScalarField divergence(const VectorField2& v) {
  Spectrum s = derivative(to_spectral(v[0]), 1);
  s += derivative(to_spectral(v[1]), 2);
  return to_physical(s);
}

ScalarField perp_divergence(const VectorField2& v) {
  Spectrum s = perp_derivative(to_spectral(v[0]), 1);
  s += perp_derivative(to_spectral(v[1]), 2);
  return to_physical(s);
}

VectorField2 leray_project(const VectorField2& v) {
  const Spectrum s1 = to_spectral(v[0]);
  const Spectrum s2 = to_spectral(v[1]);
  const Grid& g = v.grid();
  Spectrum o1(g), o2(g);
  const int n = g.n();
  for (int p1 = 0; p1 < n; ++p1) {
    const int m1 = g.mode(p1);
    const double k1 = g.wavenumber(m1);
    const bool nyq1 = (m1 == -n / 2);
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      const Complex a = s1(p1, p2);
      const Complex b = s2(p1, p2);
      // Odd mixed symbols vanish on the Nyquist lines; project onto the
      // remaining direction so the operator stays idempotent there.
      const double q1 = nyq1 ? 0.0 : k1;
      const double q2 = (p2 == n / 2) ? 0.0 : k2;
      const double qq = q1 * q1 + q2 * q2;
      if (qq == 0.0) {
        o1(p1, p2) = a;
        o2(p1, p2) = b;
        continue;
      }
      const Complex dot = q1 * a + q2 * b;
      o1(p1, p2) = a - q1 * dot / qq;
      o2(p1, p2) = b - q2 * dot / qq;
    }
  }
  return {to_physical(o1), to_physical(o2)};
}

}  // namespace ve2d
