#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ve2d/dynamics.hpp"
#include "ve2d/error.hpp"
#include "ve2d/fft.hpp"
#include "ve2d/spectral.hpp"
#include "ve2d/vector_fields.hpp"

using namespace ve2d;
using namespace ve2d::test;

namespace {

MultiIndex idx(int alpha, int dt, int d1, int d2, int rot) {
  MultiIndex m;
  m.alpha = alpha;
  m.a = {dt, d1, d2, rot};
  return m;
}

PotentialState bump(int n, double L, double amp, double mu) {
  InitialDataParams p;
  p.n = n;
  p.box_len = L;
  p.amplitude = amp;
  p.mu = mu;
  p.support_radius = L / 8.0;
  return make_initial_data(p).state;
}

/// Localized random state: all fields vanish to round-off at the box edge,
/// so products with the coordinates stay periodic.
PotentialState localized_state(Gen& gen, const Grid& g, double amp, double t, double mu) {
  const double w = g.box_len() / 10.0;
  ScalarField V = localized(gen, g, w);
  ScalarField H1 = localized(gen, g, w);
  ScalarField H2 = localized(gen, g, w);
  V *= amp;
  H1 *= amp;
  H2 *= amp;
  return PotentialState{V, VectorField2(H1, H2), t, mu};
}

}  // namespace

TEST_CASE("admissible indices") {
  CHECK(admissible_indices(0).size() == 1);
  CHECK(admissible_indices(1).size() == 6);
  CHECK(admissible_indices(2).size() == 21);
  CHECK(admissible_indices(3).size() == 56);
  const auto ix = admissible_indices(3);
  for (std::size_t i = 1; i < ix.size(); ++i) {
    CHECK(ix[i - 1].order() <= ix[i].order());
    if (ix[i - 1].order() == ix[i].order()) CHECK(ix[i - 1] < ix[i]);
  }
  CHECK(idx(1, 0, 2, 0, 1).label() == "(1;0,2,0,1)");
}

TEST_CASE("binomial weights") {
  CHECK(binomial_weight(idx(2, 1, 0, 0, 0), idx(1, 0, 0, 0, 0)) == 2.0);
  CHECK(binomial_weight(idx(0, 2, 1, 0, 0), idx(0, 1, 1, 0, 0)) == 2.0);
  CHECK(binomial_weight(idx(1, 1, 0, 0, 0), idx(0, 0, 1, 0, 0)) == 0.0);
  CHECK(binomial_weight(idx(3, 0, 0, 0, 0), idx(0, 0, 0, 0, 0)) == 1.0);
  CHECK(binomial_weight(idx(3, 0, 0, 0, 0), idx(2, 0, 0, 0, 0)) == 3.0);
}

TEST_CASE("time jet") {
  Gen gen(41);
  const Grid g(64, 16.0);
  const PotentialState s = trig_state(gen, g, 6, 0.2, 0.05);
  const std::vector<SpectralU> jet = time_jet(s, 3);
  REQUIRE(jet.size() == 4);
  const PotentialRhs r = rhs_potential(s);
  // Level 1 is the right-hand side itself, bit for bit.
  CHECK(max_diff(to_physical(jet[1].V), r.dV) == 0.0);
  CHECK(max_diff(to_physical(jet[1].H[0]), r.dH[0]) == 0.0);
  CHECK(max_diff(to_physical(jet[1].H[1]), r.dH[1]) == 0.0);
  const PotentialState d1 = time_derivative(s, 1);
  CHECK(max_diff(d1.V, r.dV) == 0.0);

  const PotentialState z{ScalarField(g), VectorField2(g), 0.0, 0.0};
  for (int m = 1; m <= 3; ++m) CHECK(max_abs(time_derivative(z, m).V) == 0.0);
  CHECK_THROWS_AS(time_derivative(s, 4), InvalidArgument);
  CHECK_THROWS_AS(time_derivative(s, 0), InvalidArgument);
  CHECK_NOTHROW(time_derivative(s, 4, 3));
}

TEST_CASE("time derivatives against differences of the evolved solution") {
  const PotentialState s0 = bump(64, 32.0, 0.3, 0.02);
  StepperConfig c;
  // Centered differences around t = 0.5 with spacing dt, evolved with a
  // step far below dt so the stepper error does not pollute the estimate.
  auto at = [&](double t) {
    PotentialIntegrator it(s0, c);
    const double dt = 1.0 / 512.0;
    while (it.time() < t - 1e-12) it.advance(std::min(dt, t - it.time()));
    return it.state();
  };
  const PotentialState mid = at(0.5);
  const PotentialState d1 = time_derivative(mid, 1);
  const PotentialState d2 = time_derivative(mid, 2);
  double e1[2], e2[2];
  for (int r = 0; r < 2; ++r) {
    const double h = r == 0 ? 0.125 : 0.0625;
    const PotentialState up = at(0.5 + h);
    const PotentialState dn = at(0.5 - h);
    e1[r] = max_diff((0.5 / h) * (up.V - dn.V), d1.V);
    e2[r] = max_diff((1.0 / (h * h)) * (up.V - 2.0 * mid.V + dn.V), d2.V);
  }
  CHECK(e1[0] / e1[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2[0] / e2[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("rotation and radial derivative") {
  const Grid g(128, 32.0);
  // Radial V: Omega V = 0 away from the origin cell.
  const ScalarField radial = ScalarField::from_function(g, [](double x1, double x2) {
    return std::exp(-(x1 * x1 + x2 * x2) / 9.0);
  });
  CHECK(max_abs(to_physical(rotation(to_spectral(radial)))) <= 1e-10);

  Gen gen(42);
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField f = localized(gen, g, 3.0);
    const Spectrum fs = to_spectral(f);
    // [d1, Omega] f = d2 f
    const ScalarField comm = to_physical(derivative(rotation(fs), 1) - rotation(derivative(fs, 1)));
    CHECK(max_diff(comm, derivative(f, 2)) <= 1e-10 * max_abs(derivative(f, 2)));
    // x . grad f against its definition
    const ScalarField d1 = derivative(f, 1), d2 = derivative(f, 2);
    ScalarField want(g);
    for (int i1 = 0; i1 < g.n(); ++i1)
      for (int i2 = 0; i2 < g.n(); ++i2) want(i1, i2) = g.coord(i1) * d1(i1, i2) + g.coord(i2) * d2(i1, i2);
    CHECK(max_diff(to_physical(radial_derivative(fs)), want) <= 1e-10 * max_abs(want));
  }
}

TEST_CASE("family structure") {
  Gen gen(43);
  const Grid g(64, 32.0);
  const PotentialState s = localized_state(gen, g, 0.05, 0.0, 0.01);
  const DerivedFamily fam = derived_family(s, 2);
  CHECK(fam.size() == 21);
  CHECK(derived_family(s, 1).size() == 6);
  CHECK_THROWS_AS(derived_family(s, 4), InvalidArgument);

  const FamilyEntry& base = fam[MultiIndex{}];
  CHECK(max_diff(base.V, s.V) == 0.0);
  CHECK(max_diff(base.H[0], s.H[0]) == 0.0);
  CHECK(max_diff(base.H[1], s.H[1]) == 0.0);

  // At t = 0 the modified scaling is x . grad - 1.
  const FamilyEntry& sc = fam[idx(1, 0, 0, 0, 0)];
  const ScalarField want = to_physical(radial_derivative(to_spectral(s.V))) - s.V;
  CHECK(max_diff(sc.V, want) <= 1e-12 * max_abs(want));

  // Canonical applications reproduce the stored entries.
  for (const MultiIndex& i : fam.indices()) {
    for (FieldOp op : {FieldOp::Scale, FieldOp::Dt, FieldOp::D1, FieldOp::D2, FieldOp::Rot}) {
      const MultiIndex next = incremented(i, op);
      if (next.order() > fam.k_max()) {
        CHECK_THROWS_AS(apply_field(op, fam, i), InvalidArgument);
        continue;
      }
      bool canonical = true;
      try {
        const FamilyEntry e = apply_field(op, fam, i);
        CHECK(max_diff(e.V, fam[next].V) <= 1e-13 * std::max(1e-30, max_abs(fam[next].V)));
        CHECK(max_diff(e.H[0], fam[next].H[0]) <= 1e-13 * std::max(1e-30, max_abs(fam[next].H[0])));
      } catch (const InvalidArgument&) {
        canonical = false;
      }
      if (op == FieldOp::Scale) CHECK(canonical);
    }
  }
  CHECK_THROWS_AS(apply_field(FieldOp::Rot, fam, idx(0, 0, 1, 0, 0)), InvalidArgument);
  CHECK_THROWS_AS(apply_field(FieldOp::Dt, fam, idx(1, 0, 0, 0, 0)), InvalidArgument);
}

TEST_CASE("modified rotation of a constant H") {
  const Grid g(32, 16.0);
  ScalarField c1(g), c2(g);
  for (double& v : c1.values()) v = 0.3;
  for (double& v : c2.values()) v = -0.7;
  const PotentialState s{ScalarField(g), VectorField2(c1, c2), 0.0, 0.0};
  const DerivedFamily fam = derived_family(s, 1);
  const FamilyEntry& r = fam[idx(0, 0, 0, 0, 1)];
  // Omega H = 0, so rot H = -H^perp = (H2, -H1).
  CHECK(max_diff(r.H[0], c2) <= 1e-15);
  CHECK(max_diff(r.H[1], -1.0 * c1) <= 1e-15);
  CHECK(max_abs(r.V) <= 1e-15);
}

TEST_CASE("nonlinearity families") {
  Gen gen(44);
  const Grid g(64, 16.0);
  const PotentialState z{ScalarField(g), VectorField2(g), 0.0, 0.0};
  const DerivedFamily zf = derived_family(z, 2);
  for (const MultiIndex& i : zf.indices()) {
    const NonlinearityTerms f = nonlinearity_f(zf, i);
    CHECK(max_abs(f.f1) == 0.0);
    CHECK(max_abs(f.f2[0]) == 0.0);
    CHECK(max_abs(f.f3) == 0.0);
  }

  // Low modes: products stay below the dealiasing cutoff, so the direct
  // pointwise forms are exact.
  const TrigField v = random_trig(gen, g.box_len(), 4, 4, 0.1);
  const TrigField h1 = random_trig(gen, g.box_len(), 4, 4, 0.1);
  const TrigField h2 = random_trig(gen, g.box_len(), 4, 4, 0.1);
  const PotentialState s{v.sample(g), VectorField2(h1.sample(g), h2.sample(g)), 0.0, 0.0};
  const DerivedFamily fam = derived_family(s, 2);
  const NonlinearityTerms f0 = nonlinearity_f(fam, MultiIndex{});
  const ScalarField f3 = ScalarField::from_function(g, [&](double x1, double x2) {
    return -h2.eval(x1, x2, 0, 1) * h1.eval(x1, x2, 1, 0) + h2.eval(x1, x2, 1, 0) * h1.eval(x1, x2, 0, 1);
  });
  CHECK(max_diff(f0.f3, f3) <= 1e-12 * max_abs(f3));

  for (const MultiIndex& i : fam.indices()) {
    const NonlinearityTerms f = nonlinearity_f(fam, i);
    ScalarField sum(g);
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) sum += riesz_pp(a, b, f.fij[2 * (a - 1) + (b - 1)]);
    const double scale = std::max(1e-300, max_abs(f.f1));
    CHECK(max_diff(f.f1, sum) <= 1e-12 * scale);

    const NonlinearityTerms w = nonlinearity_f_swapped(fam, i);
    CHECK(max_diff(f.f1, w.f1) <= 1e-12 * scale);
    for (int k = 0; k < 4; ++k) CHECK(max_diff(f.fij[k], w.fij[k]) <= 1e-12 * std::max(1e-300, max_abs(f.fij[k])));
  }
}

TEST_CASE("scaled family") {
  Gen gen(45);
  const Grid g(32, 16.0);
  const PotentialState s = localized_state(gen, g, 0.1, 0.3, 0.0);
  const DerivedFamily fam = derived_family(s, 1);
  const DerivedFamily twice = scaled(fam, 2.0);
  for (const MultiIndex& i : fam.indices()) {
    CHECK(max_diff(twice[i].V, 2.0 * fam[i].V) == 0.0);
    CHECK(max_diff(twice[i].H[1], 2.0 * fam[i].H[1]) == 0.0);
  }
}

TEST_CASE("commutator residuals on a resolved small-data trajectory") {
  const PotentialState s0 = bump(256, 32.0, 0.01, 0.01);
  PotentialIntegrator it(s0, StepperConfig{});
  it.advance_to(2.0);
  const DerivedFamily fam = derived_family(it.state(), 2);
  const CommutatorResidual r = commutator_residual(fam, idx(0, 0, 1, 0, 0));
  CHECK(r.scale > 0.0);
  CHECK(r.v_linf <= 1e-6);
  CHECK(r.h_linf <= 1e-6);
  CHECK(r.constraint_linf <= 1e-6);
  double worst = 0.0;
  for (const CommutatorResidual& c : commutator_residuals(fam)) worst = std::max(worst, c.max());
  CHECK(worst <= 1e-6);
}
