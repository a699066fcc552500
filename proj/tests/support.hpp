#pragma once

// Test-side oracles: trigonometric fields with closed-form derivatives,
// fourth-order finite differences, and a small seeded generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ve2d/field.hpp"
#include "ve2d/state.hpp"

namespace ve2d::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

/// sum_j a_j cos(k_j . x) + b_j sin(k_j . x) with integer modes on a box of
/// side L; every derivative is available in closed form.
struct TrigField {
  struct Mode {
    int m1, m2;
    double a, b;
  };
  double L;
  std::vector<Mode> modes;

  double k(int m) const { return 2.0 * std::numbers::pi * m / L; }

  /// d1^p d2^q of the field at x.
  double eval(double x1, double x2, int p = 0, int q = 0) const {
    double acc = 0.0;
    for (const Mode& m : modes) {
      const double k1 = k(m.m1);
      const double k2 = k(m.m2);
      const double ph = k1 * x1 + k2 * x2;
      // d^n cos = cos(ph + n pi/2) * k^n, likewise for sin.
      const int n = p + q;
      const double scale = std::pow(k1, p) * std::pow(k2, q);
      const double shift = n * std::numbers::pi / 2.0;
      acc += scale * (m.a * std::cos(ph + shift) + m.b * std::sin(ph + shift));
    }
    return acc;
  }

  ScalarField sample(const Grid& g, int p = 0, int q = 0) const {
    return ScalarField::from_function(g, [&](double x1, double x2) { return eval(x1, x2, p, q); });
  }
};

inline TrigField random_trig(Gen& gen, double L, int max_mode, int count, double amp = 1.0) {
  TrigField f{L, {}};
  for (int i = 0; i < count; ++i) {
    f.modes.push_back({gen.integer(-max_mode, max_mode), gen.integer(0, max_mode),
                       amp * gen.normal(), amp * gen.normal()});
  }
  return f;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// max |a - b| / max |b|, with 0/0 = 0.
inline double rel_diff(const ScalarField& a, const ScalarField& b) {
  const double d = max_diff(a, b);
  const double s = max_abs(b);
  return s > 0.0 ? d / s : d;
}

/// Fourth-order centered difference, periodic.
inline ScalarField fd4(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  const int n = g.n();
  const double h = g.spacing();
  ScalarField out(g);
  auto at = [&](int i1, int i2) { return f((i1 + n) % n, (i2 + n) % n); };
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const int d1 = axis == 1 ? 1 : 0;
      const int d2 = axis == 2 ? 1 : 0;
      out(i1, i2) = (-at(i1 + 2 * d1, i2 + 2 * d2) + 8.0 * at(i1 + d1, i2 + d2) -
                     8.0 * at(i1 - d1, i2 - d2) + at(i1 - 2 * d1, i2 - 2 * d2)) /
                    (12.0 * h);
    }
  }
  return out;
}

/// Sum h^2 f^2 written out directly.
inline double quad_sq(const ScalarField& f) {
  const double h = f.grid().spacing();
  double acc = 0.0;
  for (double v : f.values()) acc += v * v;
  return acc * h * h;
}

inline PotentialState trig_state(Gen& gen, const Grid& g, int max_mode, double amp, double mu = 0.0) {
  const double L = g.box_len();
  return PotentialState{random_trig(gen, L, max_mode, 4, amp).sample(g),
                        VectorField2(random_trig(gen, L, max_mode, 4, amp).sample(g),
                                     random_trig(gen, L, max_mode, 4, amp).sample(g)),
                        0.0, mu};
}

/// Gaussian bump exp(-|x|^2 / w^2) times a random trigonometric modulation.
inline ScalarField localized(Gen& gen, const Grid& g, double w) {
  const TrigField mod = random_trig(gen, g.box_len(), 3, 3);
  const double c = gen.normal();
  return ScalarField::from_function(g, [&](double x1, double x2) {
    return (c + mod.eval(x1, x2)) * std::exp(-(x1 * x1 + x2 * x2) / (w * w));
  });
}

}  // namespace ve2d::test
