// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//   ve2d_acceptance [output_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ve2d/config.hpp"
#include "ve2d/diagnostics.hpp"
#include "ve2d/dynamics.hpp"
#include "ve2d/error.hpp"
#include "ve2d/experiment.hpp"
#include "ve2d/spectral.hpp"
#include "ve2d/state.hpp"
#include "ve2d/vector_fields.hpp"

using namespace ve2d;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kExactIdentity = 1e-12;
constexpr double kPolarIdentity = 1e-8;
constexpr double kIdentitySeconds = 10.0;
constexpr int kIdentitySamples = 100;
constexpr double kEquivalence = 1e-6;
constexpr double kConstraint = 1e-8;
constexpr double kCommutator = 1e-6;
constexpr double kCommutatorRefinement = 4.0;
constexpr double kGoodLo = -1.8, kGoodHi = -1.2;
constexpr double kGradLo = -0.8, kGradHi = -0.3;
constexpr double kEnergyRatio = 2.0;
constexpr double kTopGrowth = 0.25;
constexpr double kRk4Lo = 10.0, kRk4Hi = 22.0;
constexpr double kHeat = 1e-14;
constexpr double kSobolev = 10.0;
constexpr double kNonlinear = 50.0;

const char* kConfig =
    "[grid]\nn = 256\nL = 64\n"
    "[initial]\namplitude = 0.01\nprofile = gaussian\nsupport_radius = 8\n"
    "[run]\nmu = 0, 0.001, 0.01, 0.1\nt_final = 16\nsample_interval = 0.5\nk_max = 2\n"
    "snapshots = false\n"
    "[stepper]\nscheme = if-rk4\ncfl = 0.5\n";

int failures = 0;

void report(int id, bool ok, const std::string& text) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, text.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double commutator_max(const PotentialState& s, int k_max) {
  double m = 0.0;
  for (const CommutatorResidual& r : commutator_residuals(derived_family(s, k_max))) m = std::max(m, r.max());
  return m;
}

void identities() {
  const Grid g(256, 64.0);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double exact = 0.0, polar = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < kIdentitySamples; ++i) {
    const std::uint64_t base = rng();
    auto field = [&](std::uint64_t k) { return random_band_limited(g, base + k, 6); };
    const FamilyEntry a{field(0), VectorField2(field(1), field(2))};
    const FamilyEntry b{field(3), VectorField2(field(4), field(5))};
    const IdentityReport r = identity_checks(a, b, GeometryWeights(g, unit(rng) * 16.0));
    exact = std::max(exact, r.max_exact());
    polar = std::max(polar, r.polar_gradient);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, exact <= kExactIdentity && polar <= kPolarIdentity && secs < kIdentitySeconds,
         fmt("identities on %d random fields: exact %.3g (<= %g), polar %.3g (<= %g), %.2f s (< %g s)",
             kIdentitySamples, exact, kExactIdentity, polar, kPolarIdentity, secs, kIdentitySeconds));
}

void equivalence(const RunConfig& cfg) {
  double worst = 0.0;
  std::string detail;
  for (double mu : {0.0, 0.01}) {
    InitialDataParams p = cfg.initial;
    p.mu = mu;
    const PotentialState s0 = make_initial_data(p).state;
    PotentialIntegrator pot(s0, cfg.stepper);
    PrimitiveIntegrator prim(primitive_of(s0), cfg.stepper);
    double m = 0.0;
    for (double t : sample_times(cfg.t_final, cfg.sample_interval)) {
      pot.advance_to(t);
      prim.advance_to(t);
      const VectorField2 v = velocity_of(pot.state().V);
      const PrimitiveState q = prim.state();
      for (int i = 0; i < 2; ++i) m = std::max(m, max_diff(v[i], q.v[i]));
    }
    worst = std::max(worst, m);
    detail += fmt(" mu=%g: %.3g", mu, m);
  }
  report(2, worst <= kEquivalence,
         fmt("potential vs primitive velocity, max over samples to t=%g:%s (<= %g)", cfg.t_final,
             detail.c_str(), kEquivalence));
}

void stepper_order() {
  InitialDataParams p;
  p.n = 64;
  p.box_len = 64.0;
  p.amplitude = 0.5;
  p.mu = 0.02;
  p.support_radius = 64.0 / 5.0;
  const PotentialState s0 = make_initial_data(p).state;
  const double T = 4.0;
  auto run = [&](double dt) {
    PotentialIntegrator it(s0, StepperConfig{});
    const long steps = std::lround(T / dt);
    for (long i = 0; i < steps; ++i) it.advance(dt);
    return it.spectral();
  };
  auto dist = [](SpectralU a, const SpectralU& b) {
    a.axpy(-1.0, b);
    return std::sqrt(spectral_l2_norm_sq(a.V) + spectral_l2_norm_sq(a.H[0]) + spectral_l2_norm_sq(a.H[1]));
  };
  const SpectralU ref = run(T / 256);
  const double ratio = dist(run(0.25), ref) / dist(run(0.125), ref);

  const Grid g(32, 2.0 * std::numbers::pi);
  const double mu = 0.3;
  const double k1 = g.wavenumber(3), k2 = g.wavenumber(-2);
  const ScalarField V = ScalarField::from_function(g, [&](double x1, double x2) { return std::cos(k1 * x1 + k2 * x2); });
  StepperConfig c;
  c.coupling = false;
  c.nonlinear = false;
  c.dt = 0.02;
  PotentialState s{V, VectorField2(g), 0.0, mu};
  for (int i = 0; i < 25; ++i) s = step(s, c);
  const double heat = max_diff(s.V, std::exp(-mu * (k1 * k1 + k2 * k2) * s.t) * V);

  report(8, ratio >= kRk4Lo && ratio <= kRk4Hi && heat <= kHeat,
         fmt("IF-RK4 error ratio under dt halving %.3g (in [%g, %g]), heat-only error %.3g (<= %g)", ratio,
             kRk4Lo, kRk4Hi, heat, kHeat));
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::remove_all(out);
    RunConfig cfg = parse_config(kConfig);
    cfg.output_dir = out.string();

    identities();
    equivalence(cfg);

    const SweepReport sweep = sweep_viscosity(cfg);
    const RunResult* base = nullptr;
    for (const RunResult& r : sweep.runs)
      if (r.mu == 0.0) base = &r;
    if (sweep.failed || base == nullptr) {
      for (const RunResult& r : sweep.runs)
        if (r.blew_up) std::printf("run mu=%g failed: %s\n", r.mu, r.failure.c_str());
      throw Error("viscosity sweep failed");
    }

    report(3, base->max_constraint_linf <= kConstraint,
           fmt("constraint residual, max L-inf over %zu samples: %.3g (<= %g)", base->records.size(),
               base->max_constraint_linf, kConstraint));

    // Commutator residuals along the mu = 0 run, then the same time on a
    // grid with twice the spacing.
    {
      PotentialIntegrator it(make_initial_data(cfg.initial).state, cfg.stepper);
      double fine = 0.0, fine_at8 = 0.0;
      InequalityRatios worst;
      for (double t : {4.0, 8.0, 12.0, 16.0}) {
        it.advance_to(t);
        const PotentialState s = it.state();
        const DerivedFamily fam = derived_family(s, cfg.k_max);
        double m = 0.0;
        for (const CommutatorResidual& r : commutator_residuals(fam)) m = std::max(m, r.max());
        fine = std::max(fine, m);
        if (t == 8.0) fine_at8 = m;
        const InequalityRatios q = inequality_ratios(fam, GeometryWeights(s.grid(), s.t));
        worst.sobolev_r = std::max(worst.sobolev_r, q.sobolev_r);
        worst.sobolev_weighted = std::max(worst.sobolev_weighted, q.sobolev_weighted);
        worst.sobolev_interior = std::max(worst.sobolev_interior, q.sobolev_interior);
        worst.f2_bound = std::max(worst.f2_bound, q.f2_bound);
        worst.f3_bound = std::max(worst.f3_bound, q.f3_bound);
        worst.div_f2_bound = std::max(worst.div_f2_bound, q.div_f2_bound);
        worst.fij_bound = std::max(worst.fij_bound, q.fij_bound);
      }
      InitialDataParams coarse_p = cfg.initial;
      coarse_p.n = cfg.initial.n / 2;
      PotentialIntegrator coarse(make_initial_data(coarse_p).state, cfg.stepper);
      coarse.advance_to(8.0);
      const double coarse_at8 = commutator_max(coarse.state(), cfg.k_max);
      const double drop = fine_at8 > 0.0 ? coarse_at8 / fine_at8 : INFINITY;
      report(4, fine <= kCommutator && drop >= kCommutatorRefinement,
             fmt("commutator residual max %.3g at t=4,8,12,16 (<= %g); t=8 residual n=%d %.3g, n=%d %.3g, "
                 "drop %.3g (>= %g)",
                 fine, kCommutator, coarse_p.n, coarse_at8, cfg.initial.n, fine_at8, drop, kCommutatorRefinement));

      const double sob = std::max({worst.sobolev_r, worst.sobolev_weighted, worst.sobolev_interior});
      const double nl = std::max({worst.f2_bound, worst.f3_bound, worst.div_f2_bound, worst.fij_bound});
      // Reported last so the lines come out in order.
      const std::string ratios_line =
          fmt("Sobolev ratios max %.3g (<= %g); nonlinear ratios f2 %.3g, f3 %.3g, div f2 %.3g, fij %.3g (<= %g)",
              sob, kSobolev, worst.f2_bound, worst.f3_bound, worst.div_f2_bound, worst.fij_bound, kNonlinear);

      const bool fits = base->good_fit && base->gradient_fit;
      const double good = fits ? base->good_fit->exponent : NAN;
      const double grad = fits ? base->gradient_fit->exponent : NAN;
      report(5, fits && good >= kGoodLo && good <= kGoodHi && grad >= kGradLo && grad <= kGradHi,
             fmt("decay exponents over [%g, %g]: good unknowns %.3f (in [%g, %g]), gradient %.3f (in [%g, %g])",
                 5.0 * cfg.t_final / 16.0, cfg.t_final, good, kGoodLo, kGoodHi, grad, kGradLo, kGradHi));

      double growth = -INFINITY;
      bool have_growth = true;
      for (const RunResult& r : sweep.runs) {
        if (!r.calE_top_fit) have_growth = false;
        else growth = std::max(growth, r.calE_top_fit->exponent);
      }
      const double e1 = sweep.max_over_mu.size() > 1 ? sweep.max_over_mu[1] : INFINITY;
      report(6, e1 <= kEnergyRatio && have_growth && growth <= kTopGrowth,
             fmt("max_t E1(t)/E1(0) over mu in {0, 1e-3, 1e-2, 1e-1}: %.6f (<= %g); calE%d growth exponent max "
                 "%.3g (<= %g)",
                 e1, kEnergyRatio, cfg.k_max, growth, kTopGrowth));

      const ConvergenceReport conv = convergence_study(cfg);
      std::string diffs;
      for (const ConvergenceRow& r : conv.rows)
        if (r.mu > 0.0) diffs += fmt(" mu=%g: %.4g", r.mu, r.l2_diff);
      report(7, conv.strictly_decreasing,
             fmt("||U_mu(T) - U_0(T)||:%s, strictly decreasing; fitted order %.3f (reported only)", diffs.c_str(),
                 conv.order));

      stepper_order();

      report(9, sob <= kSobolev && nl <= kNonlinear, ratios_line);
    }
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
