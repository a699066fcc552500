#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ve2d/field.hpp"
#include "ve2d/vector_fields.hpp"

namespace ve2d {

/// Radial weights at time t. r is regularized to max(|x|, h) wherever it
/// appears in a denominator or in omega.
struct GeometryWeights {
  Grid grid;
  double t;
  ScalarField r;       ///< regularized radius
  ScalarField omega1;  ///< x1 / r
  ScalarField omega2;  ///< x2 / r
  ScalarField sigma;   ///< r - t (unregularized r)
  ScalarField ghost;   ///< exp(arctan sigma)
  std::vector<unsigned char> mask;  ///< r >= <t>/2
  std::size_t mask_count = 0;

  GeometryWeights(const Grid& g, double time);

  double bracket_t() const noexcept;  ///< <t> = sqrt(1 + t^2)
  double x1(std::size_t k) const noexcept;
  double x2(std::size_t k) const noexcept;
  double radius(std::size_t k) const noexcept;  ///< unregularized |x|
};

/// E_k for k = 0..k_max and calE_k for k = 1..k_max + 1 (calE[0] = 0).
struct Energies {
  std::vector<double> E;
  std::vector<double> calE;
};
Energies energies(const DerivedFamily& fam);

/// X_k, Y_k, G_k for k = 1..k_max + 1 (entry 0 unused). G_plain drops the
/// ghost factor exp(q).
struct WeightedNorms {
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<double> G;
  std::vector<double> G_plain;
};
WeightedNorms weighted_norms(const DerivedFamily& fam, const GeometryWeights& w);

struct GoodUnknownNorms {
  std::vector<std::pair<MultiIndex, double>> per_index;
  double summed = 0.0;
  /// sup |grad U| of the base state over the whole box.
  double gradient_sup = 0.0;
};
/// sup over the mask of max_i (|d_i V + d_i H . omega| + |d_i H . omega^perp|)
/// for every index of order <= max_order (default: all). Throws
/// InvalidArgument when the mask is empty.
GoodUnknownNorms good_unknown_norms(const DerivedFamily& fam, const GeometryWeights& w,
                                    int max_order = -1);

/// Relative residuals (max |lhs - rhs| / max |terms|) of exact algebraic
/// identities. Zero fields give 0.
struct IdentityReport {
  double radial_split = 0.0;     ///< d_i H^A . d_k d_j H - d_i V^A d_k d_j V through good unknowns
  double f2_split = 0.0;         ///< f2 written through good unknowns
  double polar_gradient = 0.0;   ///< grad f = omega d_r f + omega^perp / r d_theta f, r >= 4h
  double binomial_cancel = 0.0;  ///< sum C gp_j V^beta d_j V^gamma = 0
  double perp_cancel = 0.0;      ///< sum_j gp_j d_j f = 0
  double riesz_trace = 0.0;      ///< sum_i riesz_pp(i, i, f) = 0
  double vector_split = 0.0;     ///< W . d_k H^A split along omega and omega^perp
  double perp_swap = 0.0;        ///< gp_j V^A d_k d_j V + d_k gp_j V d_j V^A = 0 inserted

  double max_exact() const noexcept;  ///< everything except polar_gradient
};

/// Identities on a pair of unknowns: a plays U^(alpha,a), b plays U.
IdentityReport identity_checks(const FamilyEntry& a, const FamilyEntry& b,
                               const GeometryWeights& w);
/// Identities across a family: every index against the base entry, and the
/// binomial sums of every index.
IdentityReport identity_checks(const DerivedFamily& fam, const GeometryWeights& w);

/// Measured constants of the weighted Sobolev inequalities and of the
/// pointwise nonlinearity bounds. The Sobolev ratios compare a sup with norms;
/// the nonlinearity bounds compare L2 norms over the mask.
struct InequalityRatios {
  double sobolev_r = 0.0;        ///< r |f|^2 vs sum_a ||d_r Omega^a f||^2 + ||Omega^a f||^2
  double sobolev_weighted = 0.0; ///< same with <t - r>^2
  double sobolev_interior = 0.0; ///< <t> sup_{r <= t/2} |f| vs sum ||<t - r> d^a f||
  double f2_bound = 0.0;
  double f3_bound = 0.0;
  double div_f2_bound = 0.0;
  double fij_bound = 0.0;

  double sobolev_max() const noexcept;
  double nonlinear_max() const noexcept;
};

/// Sobolev ratios for one scalar f at time t.
InequalityRatios sobolev_ratios(const ScalarField& f, const GeometryWeights& w);
InequalityRatios inequality_ratios(const DerivedFamily& fam, const GeometryWeights& w);

struct DiagnosticsRecord {
  double t = 0.0;
  double mu = 0.0;
  Energies energy;
  WeightedNorms weighted;
  double good_sup = 0.0;
  double gradient_sup = 0.0;
  double constraint_l2 = 0.0;
  double constraint_linf = 0.0;
  IdentityReport identities;
};

/// Everything above except the inequality ratios, for one family.
DiagnosticsRecord diagnose(const DerivedFamily& fam, const VectorField2& base_H);

const std::string& csv_header();
/// One CSV row in header order; needs k_max >= 2.
std::string csv_row(const DiagnosticsRecord& r);

struct DecayFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log(value) against log(t) over t in [t0, t1].
/// Rejects fewer than 8 samples and non-positive values or times.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double t0, double t1);

}  // namespace ve2d
