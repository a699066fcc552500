#include "ve2d/state.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ve2d/error.hpp"
#include "ve2d/spectral.hpp"

namespace ve2d {

Tensor2::Tensor2(const Grid& grid)
    : g_{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

Tensor2::Tensor2(ScalarField g11, ScalarField g12, ScalarField g21, ScalarField g22)
    : g_{std::move(g11), std::move(g12), std::move(g21), std::move(g22)} {
  for (const auto& g : g_) require_same_grid(g_[0].grid(), g.grid());
}

void validate_viscosity(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw InvalidArgument("viscosity must lie in [0, 1]");
  }
}

VectorField2 velocity_of(const ScalarField& V) { return perp_gradient(V); }

Tensor2 deformation_of(const VectorField2& H) {
  const Spectrum h1 = to_spectral(H[0]);
  const Spectrum h2 = to_spectral(H[1]);
  return Tensor2(to_physical(perp_derivative(h1, 1)), to_physical(perp_derivative(h2, 1)),
                 to_physical(perp_derivative(h1, 2)), to_physical(perp_derivative(h2, 2)));
}

VectorField2 divergence_of_transpose(const Tensor2& G) {
  Spectrum c1 = derivative(to_spectral(G(0, 0)), 1);
  c1 += derivative(to_spectral(G(1, 0)), 2);
  Spectrum c2 = derivative(to_spectral(G(0, 1)), 1);
  c2 += derivative(to_spectral(G(1, 1)), 2);
  return {to_physical(c1), to_physical(c2)};
}

ConstraintResidual constraint_residual(const VectorField2& H) {
  const Spectrum h1 = to_spectral(H[0]);
  const Spectrum h2 = to_spectral(H[1]);
  Spectrum lin = perp_derivative(h1, 1);
  lin += perp_derivative(h2, 2);
  ScalarField res = to_physical(lin);
  const ScalarField a1 = to_physical(perp_derivative(h2, 1));
  const ScalarField a2 = to_physical(perp_derivative(h2, 2));
  const ScalarField b1 = to_physical(derivative(h1, 1));
  const ScalarField b2 = to_physical(derivative(h1, 2));
  for (std::size_t k = 0; k < res.size(); ++k) res[k] -= a1[k] * b1[k] + a2[k] * b2[k];
  ConstraintResidual out{res, l2_norm(res), linf_norm(res)};
  return out;
}

namespace {

ScalarField profile_field(const Grid& g, const InitialDataParams& p) {
  const double radius = p.support_radius;
  switch (p.profile) {
    case ProfileKind::GaussianBump: {
      const double w = radius / 5.0;
      return ScalarField::from_function(g, [w](double x1, double x2) {
        return std::exp(-(x1 * x1 + x2 * x2) / (w * w));
      });
    }
    case ProfileKind::Ring: {
      const double r0 = radius / 2.0;
      const double w = radius / 10.0;
      return ScalarField::from_function(g, [r0, w](double x1, double x2) {
        const double s = (std::sqrt(x1 * x1 + x2 * x2) - r0) / w;
        return std::exp(-s * s);
      });
    }
    case ProfileKind::SpectralSeed: {
      // Random smooth modes under the same Gaussian window as the bump.
      const double w = radius / 5.0;
      std::mt19937_64 rng(p.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      constexpr int kModes = 3;
      double amp[2 * kModes + 1][2 * kModes + 1];
      double phase[2 * kModes + 1][2 * kModes + 1];
      for (auto& row : amp) for (double& a : row) a = normal(rng);
      std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
      for (auto& row : phase) for (double& a : row) a = uniform(rng);
      const double k0 = 1.0 / w;
      ScalarField f = ScalarField::from_function(g, [&](double x1, double x2) {
        double acc = 0.0;
        for (int a = -kModes; a <= kModes; ++a) {
          for (int b = -kModes; b <= kModes; ++b) {
            acc += amp[a + kModes][b + kModes] *
                   std::cos(k0 * 0.5 * (a * x1 + b * x2) + phase[a + kModes][b + kModes]);
          }
        }
        return acc * std::exp(-(x1 * x1 + x2 * x2) / (w * w));
      });
      const double peak = linf_norm(f);
      if (peak > 0.0) f *= 1.0 / peak;
      return f;
    }
  }
  throw InvalidArgument("unknown profile kind");
}

}  // namespace

InitialData make_initial_data(const InitialDataParams& p) {
  const Grid g(p.n, p.box_len);
  if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude)) {
    throw InvalidArgument("initial amplitude must be finite and non-negative");
  }
  if (!(p.support_radius > 0.0) || p.support_radius >= p.box_len / 4.0) {
    std::ostringstream msg;
    msg << "support radius " << p.support_radius << " must lie in (0, L/4 = "
        << p.box_len / 4.0 << ")";
    throw InvalidArgument(msg.str());
  }
  validate_viscosity(p.mu);

  ScalarField V = profile_field(g, p);
  double mean = 0.0;
  for (double v : V.values()) mean += v;
  mean /= static_cast<double>(V.size());
  for (double& v : V.values()) v = p.amplitude * (v - mean);

  InitialData out{PotentialState{V, VectorField2(g), 0.0, p.mu}, {}};
  const Spectrum s = to_spectral(V);
  out.norms.l2 = l2_norm(V);
  double grad = 0.0;
  double hess = 0.0;
  for (int i = 1; i <= 2; ++i) {
    const Spectrum di = derivative(s, i);
    grad += l2_norm_sq(to_physical(di));
    for (int j = 1; j <= 2; ++j) hess += l2_norm_sq(to_physical(derivative(di, j)));
  }
  out.norms.grad_l2 = std::sqrt(grad);
  out.norms.hessian_l2 = std::sqrt(hess);
  return out;
}

PrimitiveState primitive_of(const PotentialState& s) {
  return PrimitiveState{velocity_of(s.V), deformation_of(s.H), s.t, s.mu};
}

PotentialState potentials_of(const PrimitiveState& p, double tolerance) {
  const double div_v = linf_norm(divergence(p.v));
  if (div_v > tolerance) {
    std::ostringstream msg;
    msg << "velocity is not divergence-free: |div v|_inf = " << div_v;
    throw AdmissibilityError(msg.str(), div_v);
  }
  const double div_g = linf_norm(divergence_of_transpose(p.G));
  if (div_g > tolerance) {
    std::ostringstream msg;
    msg << "deformation violates div G^T = 0: residual " << div_g;
    throw AdmissibilityError(msg.str(), div_g);
  }
  // lap V = grad-perp . v and lap H_j = grad-perp_i G(i, j).
  const ScalarField V = inverse_laplacian(perp_divergence(p.v));
  Spectrum h1 = perp_derivative(to_spectral(p.G(0, 0)), 1);
  h1 += perp_derivative(to_spectral(p.G(1, 0)), 2);
  Spectrum h2 = perp_derivative(to_spectral(p.G(0, 1)), 1);
  h2 += perp_derivative(to_spectral(p.G(1, 1)), 2);
  VectorField2 H(to_physical(inverse_laplacian(h1)), to_physical(inverse_laplacian(h2)));
  return PotentialState{V, std::move(H), p.t, p.mu};
}

}  // namespace ve2d
