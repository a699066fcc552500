#pragma once

#include <vector>

#include "ve2d/field.hpp"
#include "ve2d/nonlinear.hpp"
#include "ve2d/state.hpp"

namespace ve2d {

enum class Scheme {
  IntegratingFactorRK4,  ///< classical RK4 with the viscous factor exp(-mu|k|^2 t) applied exactly
  ImexRK,                ///< ARS(2,2,2): explicit coupling/nonlinearity, implicit viscosity
};

struct StepperConfig {
  double dt = 0.0;          ///< 0 selects choose_dt on every step
  double cfl_factor = 0.5;  ///< in (0, 1]
  Scheme scheme = Scheme::IntegratingFactorRK4;
  bool dealias = true;
  bool nonlinear = true;
  bool coupling = true;

  TermSwitches switches() const { return {coupling, nonlinear, dealias}; }
  void validate() const;
};

struct PotentialRhs {
  ScalarField dV;
  VectorField2 dH;
};

struct PrimitiveRhs {
  VectorField2 dv;
  Tensor2 dG;
};

/// Right-hand side of the potential system, viscous term included:
///   dV = mu lap V + div H + sum_ij R_i^perp R_j (-gp_i V gp_j V + gp_i H . gp_j H)
///   dH_j = d_j V + gp_l H_j d_l V
PotentialRhs rhs_potential(const PotentialState& s, const TermSwitches& sw = {});

/// Right-hand side of the velocity/deformation system with the pressure
/// removed by Leray projection:
///   dv = P[mu lap v + div G - v.grad v + div(G G^T)]
///   dG = grad v - v.grad G + grad v G
PrimitiveRhs rhs_primitive(const PrimitiveState& p, const TermSwitches& sw = {});

/// cfl_factor * h / (1 + max|v|). Viscosity never limits the step.
double choose_dt(const PotentialState& s, const StepperConfig& c);
double choose_dt(const PrimitiveState& p, const StepperConfig& c);

/// One step of size c.dt (or choose_dt when c.dt == 0). Throws BlowUpError on
/// non-finite output and InvalidArgument when c.dt exceeds choose_dt.
PotentialState step(const PotentialState& s, const StepperConfig& c);
PrimitiveState step(const PrimitiveState& p, const StepperConfig& c);

/// Keeps the unknowns in spectral form between steps. Used by the drivers so
/// that a long run transforms the state only when it is sampled.
class PotentialIntegrator {
 public:
  PotentialIntegrator(const PotentialState& s, StepperConfig c);

  double time() const noexcept { return t_; }
  double mu() const noexcept { return mu_; }
  const SpectralU& spectral() const noexcept { return u_; }
  PotentialState state() const;

  /// Step size that would be used for the next step.
  double next_dt() const;
  void advance(double dt);
  /// Steps until exactly t_end, shortening the final step.
  void advance_to(double t_end);

  /// ||V||^2 + ||H||^2 + ||grad V||^2 + ||grad H||^2.
  double energy() const;
  /// Blow-up ceiling multiplier on the initial energy.
  static constexpr double kEnergyCeiling = 100.0;

 private:
  SpectralU u_;
  double t_;
  double mu_;
  StepperConfig config_;
  double initial_energy_;
};

class PrimitiveIntegrator {
 public:
  PrimitiveIntegrator(const PrimitiveState& p, StepperConfig c);

  double time() const noexcept { return t_; }
  PrimitiveState state() const;
  double next_dt() const;
  void advance(double dt);
  void advance_to(double t_end);

 private:
  std::vector<Spectrum> u_;  // v1, v2, G11, G12, G21, G22
  double t_;
  double mu_;
  StepperConfig config_;
};

}  // namespace ve2d
