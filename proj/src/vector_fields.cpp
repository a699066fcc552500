#include "ve2d/vector_fields.hpp"

#include <algorithm>
#include <sstream>

#include "ve2d/error.hpp"
#include "ve2d/fft.hpp"
#include "ve2d/spectral.hpp"

namespace ve2d {

namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ScalarField multiply_by_coord(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      out(i1, i2) = f(i1, i2) * g.coord(axis == 1 ? i1 : i2);
    }
  }
  return out;
}

SpectralU rotate(const SpectralU& u) {
  SpectralU out(rotation(u.V), rotation(u.H[0]), rotation(u.H[1]));
  out.H[0] += u.H[1];
  out.H[1] -= u.H[0];
  return out;
}

SpectralU spatial(const SpectralU& u, int axis) {
  return SpectralU(derivative(u.V, axis), derivative(u.H[0], axis), derivative(u.H[1], axis));
}

SpectralU radial(const SpectralU& u) {
  return SpectralU(radial_derivative(u.V), radial_derivative(u.H[0]),
                   radial_derivative(u.H[1]));
}

/// Applies op to a time jet, producing `levels` levels of the result.
std::vector<SpectralU> apply_op(FieldOp op, const std::vector<SpectralU>& jet, std::size_t levels,
                                double t) {
  std::vector<SpectralU> out;
  out.reserve(levels);
  for (std::size_t m = 0; m < levels; ++m) {
    switch (op) {
      case FieldOp::Dt:
        out.push_back(jet[m + 1]);
        break;
      case FieldOp::D1:
        out.push_back(spatial(jet[m], 1));
        break;
      case FieldOp::D2:
        out.push_back(spatial(jet[m], 2));
        break;
      case FieldOp::Rot:
        out.push_back(rotate(jet[m]));
        break;
      case FieldOp::Scale: {
        // d_t^m (t d_t + x.grad - 1) U = t U_{m+1} + (m - 1) U_m + x.grad U_m
        SpectralU s = radial(jet[m]);
        s.axpy(static_cast<double>(m) - 1.0, jet[m]);
        if (t != 0.0) s.axpy(t, jet[m + 1]);
        out.push_back(std::move(s));
        break;
      }
    }
  }
  return out;
}

bool canonical_left(FieldOp op, const MultiIndex& idx) {
  switch (op) {
    case FieldOp::Scale:
      return true;
    case FieldOp::Dt:
    case FieldOp::D1:
    case FieldOp::D2:
      // dt, d1, d2 commute with each other; canonical order dt d1 d2.
      if (idx.alpha != 0) return false;
      if (op == FieldOp::D1) return idx.a[0] == 0;
      if (op == FieldOp::D2) return idx.a[0] == 0 && idx.a[1] == 0;
      return true;
    case FieldOp::Rot:
      return idx.alpha == 0 && idx.a[0] == 0 && idx.a[1] == 0 && idx.a[2] == 0;
  }
  return false;
}

/// Parent index and the op that produces idx from it.
std::pair<MultiIndex, FieldOp> parent_of(const MultiIndex& idx) {
  MultiIndex p = idx;
  if (p.alpha > 0) {
    --p.alpha;
    return {p, FieldOp::Scale};
  }
  constexpr FieldOp ops[4] = {FieldOp::Dt, FieldOp::D1, FieldOp::D2, FieldOp::Rot};
  for (int i = 0; i < 4; ++i) {
    if (p.a[i] > 0) {
      --p.a[i];
      return {p, ops[i]};
    }
  }
  throw InvalidArgument("the empty word has no parent");
}

// grad-perp component i (0-based) of a field with gradient d: (-d2, d1).
inline double perp(const std::array<ScalarField, 2>& d, int i, std::size_t k) {
  return i == 0 ? -d[1][k] : d[0][k];
}

struct SpectralTerms {
  Spectrum f1;
  std::array<Spectrum, 2> f2;
  Spectrum f3;
  std::array<Spectrum, 4> fij;
};

Spectrum finish(const ScalarField& acc, bool dealias) {
  Spectrum s = to_spectral(acc);
  if (dealias) dealias_in_place(s);
  return s;
}

SpectralTerms spectral_terms(const DerivedFamily& fam, const MultiIndex& idx, bool swapped) {
  if (!fam.contains(idx)) throw InvalidArgument("index " + idx.label() + " is not in the family");
  const Grid& g = fam.grid();
  const std::size_t size = g.size();
  const bool dealias = fam.switches().dealias;

  std::array<ScalarField, 4> p{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  std::array<ScalarField, 4> q{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  std::array<ScalarField, 2> f2{ScalarField(g), ScalarField(g)};
  ScalarField f3(g);

  for (const MultiIndex& sub : fam.indices()) {
    const double w = binomial_weight(idx, sub);
    if (w == 0.0) continue;
    MultiIndex rest;
    rest.alpha = idx.alpha - sub.alpha;
    for (int i = 0; i < 4; ++i) rest.a[i] = idx.a[i] - sub.a[i];
    const Gradients& A = fam.gradients(swapped ? rest : sub);
    const Gradients& B = fam.gradients(swapped ? sub : rest);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        ScalarField& pij = p[2 * i + j];
        ScalarField& qij = q[2 * i + j];
        for (std::size_t k = 0; k < size; ++k) {
          double acc = -perp(A.dV, i, k) * perp(B.dV, j, k);
          double acc2 = A.dV[i][k] * B.dV[j][k];
          for (int m = 0; m < 2; ++m) {
            acc += perp(A.dH[m], i, k) * perp(B.dH[m], j, k);
            acc2 -= A.dH[m][i][k] * B.dH[m][j][k];
          }
          pij[k] += w * acc;
          qij[k] += w * acc2;
        }
      }
    }
    for (int m = 0; m < 2; ++m) {
      for (std::size_t k = 0; k < size; ++k) {
        f2[m][k] += w * (perp(A.dH[m], 0, k) * B.dV[0][k] + perp(A.dH[m], 1, k) * B.dV[1][k]);
      }
    }
    for (std::size_t k = 0; k < size; ++k) {
      f3[k] += w * (perp(A.dH[1], 0, k) * B.dH[0][0][k] + perp(A.dH[1], 1, k) * B.dH[0][1][k]);
    }
  }

  SpectralTerms out{Spectrum(g),
                    {finish(f2[0], dealias), finish(f2[1], dealias)},
                    finish(f3, dealias),
                    {finish(q[0], dealias), finish(q[1], dealias), finish(q[2], dealias),
                     finish(q[3], dealias)}};
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) out.f1 += riesz_pp(i, j, finish(p[2 * (i - 1) + (j - 1)], dealias));
  }
  return out;
}

NonlinearityTerms to_physical_terms(const SpectralTerms& s) {
  return NonlinearityTerms{
      to_physical(s.f1),
      VectorField2(to_physical(s.f2[0]), to_physical(s.f2[1])),
      to_physical(s.f3),
      {to_physical(s.fij[0]), to_physical(s.fij[1]), to_physical(s.fij[2]),
       to_physical(s.fij[3])}};
}

double linf_spec(const Spectrum& s) { return linf_norm(to_physical(s)); }

}  // namespace

std::string MultiIndex::label() const {
  std::ostringstream os;
  os << "(" << alpha << ";" << a[0] << "," << a[1] << "," << a[2] << "," << a[3] << ")";
  return os.str();
}

std::vector<MultiIndex> admissible_indices(int k_max) {
  if (k_max < 0) throw InvalidArgument("k_max must be non-negative");
  std::vector<MultiIndex> out;
  for (int al = 0; al <= k_max; ++al) {
    for (int a0 = 0; al + a0 <= k_max; ++a0) {
      for (int a1 = 0; al + a0 + a1 <= k_max; ++a1) {
        for (int a2 = 0; al + a0 + a1 + a2 <= k_max; ++a2) {
          for (int a3 = 0; al + a0 + a1 + a2 + a3 <= k_max; ++a3) {
            out.push_back(MultiIndex{al, {a0, a1, a2, a3}});
          }
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const MultiIndex& x, const MultiIndex& y) {
    return x.order() != y.order() ? x.order() < y.order() : x < y;
  });
  return out;
}

double binomial_weight(const MultiIndex& idx, const MultiIndex& sub) {
  double w = choose(idx.alpha, sub.alpha);
  for (int i = 0; i < 4; ++i) w *= choose(idx.a[i], sub.a[i]);
  return w;
}

std::vector<SpectralU> time_jet(const PotentialState& s, int order, const TermSwitches& sw) {
  if (order < 0) throw InvalidArgument("time-derivative order must be non-negative");
  std::vector<SpectralU> jet;
  jet.reserve(order + 1);
  jet.push_back(SpectralU::from_state(s));
  std::vector<Gradients> grads;
  for (int m = 0; m < order; ++m) {
    if (sw.nonlinear) grads.emplace_back(jet[m]);
    SpectralU next = linear_part(jet[m], s.mu, true, sw);
    if (sw.nonlinear) {
      for (int j = 0; j <= m; ++j) {
        next.axpy(choose(m, j), quadratic_form(grads[j], grads[m - j], sw.dealias));
      }
    }
    jet.push_back(std::move(next));
  }
  return jet;
}

PotentialState time_derivative(const PotentialState& s, int order, int k_max) {
  if (order < 1) throw InvalidArgument("time-derivative order must be at least 1");
  if (order > k_max + 1) {
    std::ostringstream msg;
    msg << "time-derivative order " << order << " exceeds k_max + 1 = " << k_max + 1;
    throw InvalidArgument(msg.str());
  }
  const SpectralU u = time_jet(s, order).back();
  return PotentialState{to_physical(u.V),
                        VectorField2(to_physical(u.H[0]), to_physical(u.H[1])), s.t, s.mu};
}

Spectrum rotation(const Spectrum& f) {
  ScalarField a = multiply_by_coord(to_physical(derivative(f, 2)), 1);
  a -= multiply_by_coord(to_physical(derivative(f, 1)), 2);
  return to_spectral(a);
}

Spectrum radial_derivative(const Spectrum& f) {
  ScalarField a = multiply_by_coord(to_physical(derivative(f, 1)), 1);
  a += multiply_by_coord(to_physical(derivative(f, 2)), 2);
  return to_spectral(a);
}

const DerivedFamily::Slot& DerivedFamily::slot(const MultiIndex& idx) const {
  auto it = entries_.find(idx);
  if (it == entries_.end()) throw InvalidArgument("index " + idx.label() + " is not in the family");
  return it->second;
}

const FamilyEntry& DerivedFamily::operator[](const MultiIndex& idx) const {
  return slot(idx).fields;
}

const std::vector<SpectralU>& DerivedFamily::jet(const MultiIndex& idx) const {
  return slot(idx).jet;
}

const Gradients& DerivedFamily::gradients(const MultiIndex& idx) const {
  return slot(idx).grads;
}

DerivedFamily derived_family(const PotentialState& s, int k_max, const TermSwitches& sw) {
  if (k_max < 0 || k_max > 3) throw InvalidArgument("k_max must lie in [0, 3]");
  DerivedFamily fam(s.grid(), k_max, s.t, s.mu, sw);
  fam.order_ = admissible_indices(k_max);
  const std::size_t top = static_cast<std::size_t>(k_max) + 1;

  for (const MultiIndex& idx : fam.order_) {
    std::vector<SpectralU> jet;
    FamilyEntry fields{s.V, s.H};
    if (idx.order() == 0) {
      jet = time_jet(s, static_cast<int>(top), sw);
    } else {
      const auto [parent, op] = parent_of(idx);
      const std::size_t levels = top - idx.order() + 1;
      jet = apply_op(op, fam.entries_.at(parent).jet, levels, s.t);
      fields = FamilyEntry{to_physical(jet[0].V),
                           VectorField2(to_physical(jet[0].H[0]), to_physical(jet[0].H[1]))};
    }
    Gradients grads(jet[0]);
    fam.entries_.emplace(idx, DerivedFamily::Slot{std::move(jet), std::move(fields),
                                                  std::move(grads)});
  }
  return fam;
}

DerivedFamily scaled(const DerivedFamily& fam, double lambda) {
  DerivedFamily out = fam;
  for (auto& [idx, slot] : out.entries_) {
    for (auto& level : slot.jet) level *= lambda;
    slot.fields.V *= lambda;
    slot.fields.H *= lambda;
    for (auto& d : slot.grads.dV) d *= lambda;
    for (auto& row : slot.grads.dH) {
      for (auto& d : row) d *= lambda;
    }
  }
  return out;
}

MultiIndex incremented(const MultiIndex& idx, FieldOp op) {
  MultiIndex out = idx;
  switch (op) {
    case FieldOp::Scale: ++out.alpha; break;
    case FieldOp::Dt: ++out.a[0]; break;
    case FieldOp::D1: ++out.a[1]; break;
    case FieldOp::D2: ++out.a[2]; break;
    case FieldOp::Rot: ++out.a[3]; break;
  }
  return out;
}

FamilyEntry apply_field(FieldOp op, const DerivedFamily& fam, const MultiIndex& idx) {
  const MultiIndex next = incremented(idx, op);
  if (next.order() > fam.k_max()) {
    throw InvalidArgument("index " + next.label() + " exceeds k_max");
  }
  if (!canonical_left(op, idx)) {
    throw InvalidArgument("field applied to " + idx.label() + " leaves the canonical order");
  }
  const SpectralU u = apply_op(op, fam.jet(idx), 1, fam.time()).front();
  return FamilyEntry{to_physical(u.V), VectorField2(to_physical(u.H[0]), to_physical(u.H[1]))};
}

NonlinearityTerms nonlinearity_f(const DerivedFamily& fam, const MultiIndex& idx) {
  return to_physical_terms(spectral_terms(fam, idx, false));
}

NonlinearityTerms nonlinearity_f_swapped(const DerivedFamily& fam, const MultiIndex& idx) {
  return to_physical_terms(spectral_terms(fam, idx, true));
}

double CommutatorResidual::max() const noexcept {
  return std::max({v_linf, h_linf, constraint_linf});
}

CommutatorResidual commutator_residual(const DerivedFamily& fam, const MultiIndex& idx) {
  const TermSwitches& sw = fam.switches();
  const auto& jet = fam.jet(idx);
  const SpectralU& u = jet[0];
  const SpectralU& ut = jet[1];
  const SpectralTerms f = sw.nonlinear ? spectral_terms(fam, idx, false)
                                       : SpectralTerms{Spectrum(fam.grid()),
                                                       {Spectrum(fam.grid()), Spectrum(fam.grid())},
                                                       Spectrum(fam.grid()),
                                                       {Spectrum(fam.grid()), Spectrum(fam.grid()),
                                                        Spectrum(fam.grid()), Spectrum(fam.grid())}};

  Spectrum rv = ut.V - f.f1;
  if (fam.mu() != 0.0) {
    Spectrum visc(fam.grid());
    for (int l = 0; l <= idx.alpha; ++l) {
      MultiIndex low = idx;
      low.alpha = l;
      const double sign = ((idx.alpha - l) % 2 == 0) ? 1.0 : -1.0;
      visc.axpy(sign * choose(idx.alpha, l), fam.jet(low)[0].V);
    }
    rv.axpy(-fam.mu(), laplacian(visc));
  }
  if (sw.coupling) {
    rv -= derivative(u.H[0], 1);
    rv -= derivative(u.H[1], 2);
  }

  CommutatorResidual out;
  out.index = idx;
  out.v_linf = linf_spec(rv);
  for (int j = 0; j < 2; ++j) {
    Spectrum rh = ut.H[j] - f.f2[j];
    if (sw.coupling) rh -= derivative(u.V, j + 1);
    out.h_linf = std::max(out.h_linf, linf_spec(rh));
  }
  Spectrum rc = perp_derivative(u.H[0], 1) + perp_derivative(u.H[1], 2);
  if (sw.nonlinear) rc -= f.f3;
  out.constraint_linf = linf_spec(rc);
  out.scale = std::max({linf_spec(ut.V), linf_spec(ut.H[0]), linf_spec(ut.H[1])});
  return out;
}

std::vector<CommutatorResidual> commutator_residuals(const DerivedFamily& fam) {
  std::vector<CommutatorResidual> out;
  out.reserve(fam.size());
  for (const MultiIndex& idx : fam.indices()) out.push_back(commutator_residual(fam, idx));
  return out;
}

}  // namespace ve2d
