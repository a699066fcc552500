#pragma once

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "ve2d/field.hpp"
#include "ve2d/nonlinear.hpp"
#include "ve2d/state.hpp"

namespace ve2d {

/// dt, d1, d2, the modified rotation (rot) and the modified scaling (scale).
/// rot acts as Omega on V and as Omega H - H^perp on H; scale is
/// t d_t + x.grad - 1 on every unknown.
enum class FieldOp { Dt, D1, D2, Rot, Scale };

/// Word scale^alpha dt^a[0] d1^a[1] d2^a[2] rot^a[3], rot innermost.
struct MultiIndex {
  int alpha = 0;
  std::array<int, 4> a{};

  int order() const noexcept { return alpha + a[0] + a[1] + a[2] + a[3]; }
  /// Number of time derivatives hidden in the word (dt and scale).
  int time_order() const noexcept { return alpha + a[0]; }
  std::string label() const;
  auto operator<=>(const MultiIndex&) const = default;
};

/// Every index with order() <= k_max, sorted by order, then lexicographically.
std::vector<MultiIndex> admissible_indices(int k_max);
/// C(alpha, beta) * prod_i C(a_i, b_i); zero unless sub <= idx componentwise.
double binomial_weight(const MultiIndex& idx, const MultiIndex& sub);

/// Time derivatives d_t^m U for m = 0..order, each obtained from the PDE:
///   d^{m+1} U = L d^m U + sum_j C(m, j) Q(d^j U, d^{m-j} U).
/// Level 1 is bit-identical to rhs_potential.
std::vector<SpectralU> time_jet(const PotentialState& s, int order, const TermSwitches& sw = {});

/// d_t^m (V, H). Orders above k_max + 1 are rejected; the extra order is what
/// the commutator residuals of the top entries consume.
PotentialState time_derivative(const PotentialState& s, int order, int k_max = 2);

/// Omega f = x1 d2 f - x2 d1 f with centered coordinates.
Spectrum rotation(const Spectrum& f);
/// x.grad f.
Spectrum radial_derivative(const Spectrum& f);

struct FamilyEntry {
  ScalarField V;
  VectorField2 H;
};

class DerivedFamily {
 public:
  int k_max() const noexcept { return k_max_; }
  double time() const noexcept { return t_; }
  double mu() const noexcept { return mu_; }
  const Grid& grid() const noexcept { return grid_; }
  const TermSwitches& switches() const noexcept { return sw_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<MultiIndex>& indices() const noexcept { return order_; }
  bool contains(const MultiIndex& idx) const { return entries_.count(idx) != 0; }

  /// Physical fields of U^(alpha, a).
  const FamilyEntry& operator[](const MultiIndex& idx) const;
  /// Time jet of U^(alpha, a): level m is d_t^m U^(alpha, a).
  const std::vector<SpectralU>& jet(const MultiIndex& idx) const;
  /// Physical gradients of level 0, computed once per entry.
  const Gradients& gradients(const MultiIndex& idx) const;

 private:
  friend DerivedFamily derived_family(const PotentialState& s, int k_max, const TermSwitches& sw);
  friend DerivedFamily scaled(const DerivedFamily& fam, double lambda);

  struct Slot {
    std::vector<SpectralU> jet;
    FamilyEntry fields;
    Gradients grads;
  };

  DerivedFamily(const Grid& g, int k_max, double t, double mu, TermSwitches sw)
      : grid_(g), k_max_(k_max), t_(t), mu_(mu), sw_(sw) {}
  const Slot& slot(const MultiIndex& idx) const;

  Grid grid_;
  int k_max_;
  double t_;
  double mu_;
  TermSwitches sw_;
  std::vector<MultiIndex> order_;
  std::map<MultiIndex, Slot> entries_;
};

/// All U^(alpha, a) with order <= k_max (at most 3), built by applying one
/// field to a parent: scale if alpha > 0, otherwise the leftmost of dt, d1,
/// d2, rot. Entry (0, 0) holds the state's own samples.
DerivedFamily derived_family(const PotentialState& s, int k_max = 2,
                             const TermSwitches& sw = {});

/// The family of lambda * U, obtained by scaling every stored level. Only the
/// diagnostics' quadratic-scaling property uses this.
DerivedFamily scaled(const DerivedFamily& fam, double lambda);

/// Applies op on the left of the word idx. Only canonical compositions are
/// accepted (scale may follow anything; dt, d1, d2 require alpha = 0; rot
/// requires alpha = a[0] = a[1] = a[2] = 0), and the result must stay within
/// k_max. Returns the level-0 fields of the new word.
FamilyEntry apply_field(FieldOp op, const DerivedFamily& fam, const MultiIndex& idx);
MultiIndex incremented(const MultiIndex& idx, FieldOp op);

struct NonlinearityTerms {
  ScalarField f1;               ///< sum_ij R_i^perp R_j (-gp_i V gp_j V + gp_i H . gp_j H), binomially summed
  VectorField2 f2;              ///< gp_l H_j d_l V, binomially summed
  ScalarField f3;               ///< gp H2 . grad H1, binomially summed
  std::array<ScalarField, 4> fij;  ///< d_i V d_j V - d_i H . d_j H at 2(i-1) + (j-1)
};

/// Sums over beta + gamma = alpha, b + c = a with weights C_alpha^beta C_a^b.
/// f1 is evaluated through the grad-perp products; fij feeds the check
/// f1 = sum_ij riesz_pp(i, j, fij).
NonlinearityTerms nonlinearity_f(const DerivedFamily& fam, const MultiIndex& idx);
/// Same sums with the (beta, b) and (gamma, c) roles swapped.
NonlinearityTerms nonlinearity_f_swapped(const DerivedFamily& fam, const MultiIndex& idx);

struct CommutatorResidual {
  MultiIndex index;
  double v_linf = 0.0;           ///< V equation
  double h_linf = 0.0;           ///< H equations, max over components
  double constraint_linf = 0.0;  ///< grad-perp . H^(alpha,a) - f3
  double scale = 0.0;            ///< L-infinity of d_t V^(alpha,a) and d_t H^(alpha,a)

  double max() const noexcept;
};

/// Residuals of the commuted system
///   d_t V^(alpha,a) - mu lap sum_l C(alpha,l) (-1)^(alpha-l) V^(l,a) - div H^(alpha,a) = f1
///   d_t H^(alpha,a) - grad V^(alpha,a) = f2,   grad-perp . H^(alpha,a) = f3
/// for every index of the family.
std::vector<CommutatorResidual> commutator_residuals(const DerivedFamily& fam);
CommutatorResidual commutator_residual(const DerivedFamily& fam, const MultiIndex& idx);

}  // namespace ve2d
