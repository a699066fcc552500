#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "support.hpp"
#include "ve2d/error.hpp"
#include "ve2d/snapshot.hpp"
#include "ve2d/spectral.hpp"
#include "ve2d/state.hpp"

using namespace ve2d;
using namespace ve2d::test;

TEST_CASE("velocity_of") {
  const Grid g(64, 16.0);
  const double k = 2.0 * std::numbers::pi / g.box_len();
  const ScalarField V = ScalarField::from_function(g, [k](double x1, double) { return std::sin(k * x1); });
  const VectorField2 v = velocity_of(V);
  CHECK(max_abs(v[0]) <= 1e-12);
  CHECK(max_diff(v[1], ScalarField::from_function(g, [k](double x1, double) { return k * std::cos(k * x1); })) <= 1e-12);

  Gen gen(21);
  const Grid fine(256, 64.0);
  for (int trial = 0; trial < 3; ++trial) {
    const ScalarField r = random_trig(gen, fine.box_len(), 2, 6).sample(fine);
    const VectorField2 w = velocity_of(r);
    CHECK(max_abs(divergence(w)) <= 1e-12 * max_abs(w[0]) + 1e-15);
    CHECK(rel_diff(w[0], -1.0 * fd4(r, 2)) <= 1e-6);
    CHECK(rel_diff(w[1], fd4(r, 1)) <= 1e-6);
  }
}

TEST_CASE("deformation_of") {
  const Grid g(32, 8.0);
  const Tensor2 zero = deformation_of(VectorField2(g));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(max_abs(zero(i, j)) == 0.0);

  Gen gen(22);
  for (int trial = 0; trial < 5; ++trial) {
    const TrigField h1 = random_trig(gen, g.box_len(), 6, 4);
    const TrigField h2 = random_trig(gen, g.box_len(), 6, 4);
    const Tensor2 G = deformation_of(VectorField2(h1.sample(g), h2.sample(g)));
    // G(i, j) = grad-perp_i H_j with grad-perp = (-d2, d1).
    const TrigField* h[2] = {&h1, &h2};
    for (int j = 0; j < 2; ++j) {
      CHECK(rel_diff(G(0, j), -1.0 * h[j]->sample(g, 0, 1)) <= 1e-12);
      CHECK(rel_diff(G(1, j), h[j]->sample(g, 1, 0)) <= 1e-12);
    }
    const VectorField2 div = divergence_of_transpose(G);
    CHECK(max_abs(div[0]) <= 1e-12 * max_abs(G(0, 0)) * 10);
    CHECK(max_abs(div[1]) <= 1e-12 * max_abs(G(0, 0)) * 10);
  }
}

TEST_CASE("constraint residual") {
  const Grid g(32, 8.0);
  const ConstraintResidual zero = constraint_residual(VectorField2(g));
  CHECK(zero.linf == 0.0);
  CHECK(zero.l2 == 0.0);

  Gen gen(23);
  const TrigField h1 = random_trig(gen, g.box_len(), 3, 4);
  const TrigField h2 = random_trig(gen, g.box_len(), 3, 4);
  const VectorField2 H(h1.sample(g), h2.sample(g));
  const ConstraintResidual r1 = constraint_residual(H);
  CHECK(r1.linf > 1e-3);  // not an identity

  // residual(lambda H) = lambda gp.H - lambda^2 gp H2 . grad H1
  VectorField2 H2x = H;
  H2x *= 2.0;
  const ConstraintResidual r2 = constraint_residual(H2x);
  const ScalarField quad = ScalarField::from_function(g, [&](double x1, double x2) {
    return -h2.eval(x1, x2, 0, 1) * h1.eval(x1, x2, 1, 0) + h2.eval(x1, x2, 1, 0) * h1.eval(x1, x2, 0, 1);
  });
  const ScalarField lhs = r2.field - 2.0 * r1.field;
  CHECK(rel_diff(lhs, -2.0 * quad) <= 1e-10);
}

TEST_CASE("initial data") {
  InitialDataParams p;
  p.n = 128;
  p.box_len = 32.0;
  p.support_radius = 6.0;

  p.amplitude = 0.0;
  const InitialData z = make_initial_data(p);
  CHECK(max_abs(z.state.V) == 0.0);
  CHECK(z.norms.l2 == 0.0);

  p.amplitude = 0.01;
  const InitialData d = make_initial_data(p);
  CHECK(max_abs(d.state.H[0]) == 0.0);
  CHECK(max_abs(d.state.H[1]) == 0.0);
  CHECK(constraint_residual(d.state.H).linf == 0.0);
  CHECK(d.state.t == 0.0);

  // Gradient seminorm against the closed-form gradient of the bump.
  const double w = p.support_radius / 5.0;
  const Grid g(p.n, p.box_len);
  const double A = p.amplitude;
  const ScalarField gx = ScalarField::from_function(g, [&](double x1, double x2) {
    return A * -2.0 * x1 / (w * w) * std::exp(-(x1 * x1 + x2 * x2) / (w * w));
  });
  const ScalarField gy = ScalarField::from_function(g, [&](double x1, double x2) {
    return A * -2.0 * x2 / (w * w) * std::exp(-(x1 * x1 + x2 * x2) / (w * w));
  });
  const double oracle = std::sqrt(quad_sq(gx) + quad_sq(gy));
  CHECK(d.norms.grad_l2 == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(d.norms.l2 == doctest::Approx(std::sqrt(quad_sq(d.state.V))).epsilon(1e-12));

  // Linear in the amplitude, zero mean.
  p.amplitude = 0.02;
  const InitialData d2 = make_initial_data(p);
  CHECK(max_diff(d2.state.V, 2.0 * d.state.V) <= 1e-17);
  double mean = 0.0;
  for (double v : d.state.V.values()) mean += v;
  mean /= static_cast<double>(d.state.V.size());
  CHECK(std::abs(mean) <= 1e-16);

  p.support_radius = 8.0;
  CHECK_THROWS_AS(make_initial_data(p), InvalidArgument);
  p.support_radius = 6.0;
  p.amplitude = -1.0;
  CHECK_THROWS_AS(make_initial_data(p), InvalidArgument);
  p.amplitude = 0.01;
  p.mu = 1.5;
  CHECK_THROWS_AS(make_initial_data(p), InvalidArgument);

  for (ProfileKind kind : {ProfileKind::Ring, ProfileKind::SpectralSeed}) {
    p.mu = 0.0;
    p.profile = kind;
    const InitialData r = make_initial_data(p);
    CHECK(max_abs(r.state.V) > 0.0);
    CHECK(r.state.V.is_finite());
  }
}

TEST_CASE("primitive and potential maps") {
  const Grid g(32, 8.0);
  const PotentialState zero{ScalarField(g), VectorField2(g), 0.0, 0.0};
  const PotentialState z2 = potentials_of(primitive_of(zero));
  CHECK(max_abs(z2.V) == 0.0);

  // Plane-wave V is recovered up to its mean.
  const double k = g.wavenumber(2);
  const ScalarField V = ScalarField::from_function(g, [k](double x1, double x2) { return 3.0 + std::sin(k * x1 - k * x2); });
  const PotentialState s{V, VectorField2(g), 0.5, 0.1};
  const PotentialState back = potentials_of(primitive_of(s));
  CHECK(max_diff(back.V, V - ScalarField::from_function(g, [](double, double) { return 3.0; })) <= 1e-12);
  CHECK(back.t == 0.5);
  CHECK(back.mu == 0.1);

  Gen gen(24);
  for (int trial = 0; trial < 10; ++trial) {
    const PotentialState r = trig_state(gen, g, 12, 1.0);
    const PrimitiveState p = primitive_of(r);
    const PrimitiveState p2 = primitive_of(potentials_of(p));
    const double s = max_abs(p.v[0]);
    for (int i = 0; i < 2; ++i) {
      CHECK(max_diff(p2.v[i], p.v[i]) <= 1e-10 * s);
      for (int j = 0; j < 2; ++j) CHECK(max_diff(p2.G(i, j), p.G(i, j)) <= 1e-10 * s);
    }
  }

  PrimitiveState bad = primitive_of(trig_state(gen, g, 4, 1.0));
  bad.v[0] = bad.v[0] + ScalarField::from_function(g, [k](double x1, double) { return std::sin(k * x1); });
  try {
    potentials_of(bad);
    FAIL("non-solenoidal velocity accepted");
  } catch (const AdmissibilityError& e) {
    CHECK(e.residual() > 1e-3);
  }
}

TEST_CASE("snapshot round trip and layout") {
  Gen gen(25);
  const Grid g(16, 4.0);
  PotentialState s = trig_state(gen, g, 5, 1.0, 0.25);
  s.t = 1.75;
  const std::vector<std::uint8_t> bytes = encode_snapshot(s);
  REQUIRE(bytes.size() == 4 + 4 + 4 + 8 * 3 + 3 * 8 * g.size());
  CHECK(std::memcmp(bytes.data(), "VE2D", 4) == 0);
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 8, 4);
  CHECK(n == 16u);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 36, 8);
  CHECK(first == s.V[0]);

  const PotentialState r = decode_snapshot(bytes);
  CHECK(r.t == s.t);
  CHECK(r.mu == s.mu);
  CHECK(r.grid() == s.grid());
  CHECK(encode_snapshot(r) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "ve2d_snapshot_test.ve2d";
  write_snapshot(path, s);
  CHECK(encode_snapshot(read_snapshot(path)) == bytes);
  std::filesystem::remove(path);

  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
}
