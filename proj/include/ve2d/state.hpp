#pragma once

#include <array>
#include <cstdint>

#include "ve2d/field.hpp"

namespace ve2d {

/// Evolved unknowns of the potential formulation: v = grad-perp V and
/// (F - I)^T = grad-perp H.
struct PotentialState {
  ScalarField V;
  VectorField2 H;
  double t = 0.0;
  double mu = 0.0;

  const Grid& grid() const noexcept { return V.grid(); }
};

/// 2x2 field G with zero-based entries G(i, j).
class Tensor2 {
 public:
  explicit Tensor2(const Grid& grid);
  Tensor2(ScalarField g11, ScalarField g12, ScalarField g21, ScalarField g22);

  const Grid& grid() const noexcept { return g_[0].grid(); }
  const ScalarField& operator()(int i, int j) const noexcept { return g_[2 * i + j]; }
  ScalarField& operator()(int i, int j) noexcept { return g_[2 * i + j]; }

 private:
  std::array<ScalarField, 4> g_;
};

/// Velocity v and deformation perturbation G = F - I.
struct PrimitiveState {
  VectorField2 v;
  Tensor2 G;
  double t = 0.0;
  double mu = 0.0;

  const Grid& grid() const noexcept { return v.grid(); }
};

enum class ProfileKind { GaussianBump, Ring, SpectralSeed };

struct InitialDataParams {
  double amplitude = 0.01;
  ProfileKind profile = ProfileKind::GaussianBump;
  /// Effective support; the profile falls below ~1e-11 of its peak here.
  double support_radius = 8.0;
  std::uint64_t seed = 1;
  int n = 256;
  double box_len = 64.0;
  double mu = 0.0;
};

struct Seminorms {
  double l2 = 0.0;         ///< ||V0||
  double grad_l2 = 0.0;    ///< ||grad V0||
  double hessian_l2 = 0.0; ///< ||grad^2 V0||, all four second derivatives
};

struct InitialData {
  PotentialState state;
  Seminorms norms;
};

struct ConstraintResidual {
  ScalarField field;
  double l2 = 0.0;
  double linf = 0.0;
};

/// v = grad-perp V = (-d2 V, d1 V).
VectorField2 velocity_of(const ScalarField& V);
/// G(i, j) = grad-perp_i H_j, so that G^T = grad-perp H and div G^T = 0.
Tensor2 deformation_of(const VectorField2& H);
/// (div G^T)_j = d_i G(i, j).
VectorField2 divergence_of_transpose(const Tensor2& G);

/// grad-perp . H - grad-perp H2 . grad H1, which vanishes on admissible data.
ConstraintResidual constraint_residual(const VectorField2& H);

/// V0 = amplitude * (profile - mean), H0 = 0.
InitialData make_initial_data(const InitialDataParams& p);

PrimitiveState primitive_of(const PotentialState& s);
/// Inverts primitive_of. Throws AdmissibilityError when div v or div G^T
/// exceeds the tolerance in L-infinity.
PotentialState potentials_of(const PrimitiveState& p, double tolerance = 1e-8);

void validate_viscosity(double mu);

}  // namespace ve2d
