#include "ve2d/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "ve2d/error.hpp"
#include "ve2d/fft.hpp"
#include "ve2d/spectral.hpp"
#include "ve2d/state.hpp"

namespace ve2d {

GeometryWeights::GeometryWeights(const Grid& g, double time)
    : grid(g),
      t(time),
      r(g),
      omega1(g),
      omega2(g),
      sigma(g),
      ghost(g),
      mask(g.size(), 0) {
  const double h = g.spacing();
  const double cone = 0.5 * bracket_t();
  for (int i1 = 0; i1 < g.n(); ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < g.n(); ++i2) {
      const double x2 = g.coord(i2);
      const std::size_t k = g.index(i1, i2);
      const double rr = std::max(std::hypot(x1, x2), h);
      r[k] = rr;
      omega1[k] = x1 / rr;
      omega2[k] = x2 / rr;
      sigma[k] = std::hypot(x1, x2) - t;
      ghost[k] = std::exp(std::atan(sigma[k]));
      if (rr >= cone) {
        mask[k] = 1;
        ++mask_count;
      }
    }
  }
}

double GeometryWeights::bracket_t() const noexcept { return std::sqrt(1.0 + t * t); }
double GeometryWeights::x1(std::size_t k) const noexcept {
  return grid.coord(static_cast<int>(k / grid.n()));
}
double GeometryWeights::x2(std::size_t k) const noexcept {
  return grid.coord(static_cast<int>(k % grid.n()));
}
double GeometryWeights::radius(std::size_t k) const noexcept { return std::hypot(x1(k), x2(k)); }

namespace {

double cell(const Grid& g) { return g.spacing() * g.spacing(); }

double bracket(double s) { return std::sqrt(1.0 + s * s); }

// grad-perp component i (0-based): (-d2, d1).
inline double perp(const std::array<ScalarField, 2>& d, int i, std::size_t k) {
  return i == 0 ? -d[1][k] : d[0][k];
}

inline double sq(double x) { return x * x; }

/// Accumulates max |lhs - rhs| and the largest term magnitude.
struct Residual {
  double err = 0.0;
  double scale = 0.0;

  void add(double lhs, double rhs, std::initializer_list<double> terms) {
    err = std::max(err, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(lhs));
    for (double x : terms) scale = std::max(scale, std::abs(x));
  }
  double relative() const { return scale > 0.0 ? err / scale : 0.0; }
};

struct Hessians {
  // d[c][k][j] = d_{k+1} d_{j+1} of component c (0 = V, 1 = H1, 2 = H2)
  std::array<std::array<std::array<ScalarField, 2>, 2>, 3> d;

  explicit Hessians(const SpectralU& u)
      : d{make(u.V), make(u.H[0]), make(u.H[1])} {}

  static std::array<std::array<ScalarField, 2>, 2> make(const Spectrum& s) {
    const Spectrum s1 = derivative(s, 1);
    const Spectrum s2 = derivative(s, 2);
    ScalarField d11 = to_physical(derivative(s1, 1));
    ScalarField d12 = to_physical(derivative(s1, 2));
    ScalarField d22 = to_physical(derivative(s2, 2));
    return {{{d11, d12}, {d12, d22}}};
  }
};

SpectralU spectral_of(const FamilyEntry& e) {
  return SpectralU(to_spectral(e.V), to_spectral(e.H[0]), to_spectral(e.H[1]));
}

struct Weighted {
  double w;
  const Gradients* a;
  const Gradients* b;
};

/// f2 split and the binomial cancellation on a weighted list of pairs.
void binomial_identities(const std::vector<Weighted>& pairs, const GeometryWeights& geo,
                         Residual& rf2, Residual& rcancel) {
  const std::size_t size = geo.grid.size();
  const double h = geo.grid.spacing();
  for (std::size_t k = 0; k < size; ++k) {
    if (geo.radius(k) < h) continue;
    const double om[2] = {geo.omega1[k], geo.omega2[k]};
    const double op[2] = {-om[1], om[0]};
    double f2[2] = {0.0, 0.0};
    double radial = 0.0;
    double trans = 0.0;
    double cancel = 0.0;
    double cancel_scale = 0.0;
    for (const Weighted& p : pairs) {
      const Gradients& A = *p.a;
      const Gradients& B = *p.b;
      for (int j = 0; j < 2; ++j) {
        const double hv[2] = {perp(A.dH[0], j, k), perp(A.dH[1], j, k)};
        const double dvb = B.dV[j][k];
        for (int m = 0; m < 2; ++m) f2[m] += p.w * hv[m] * dvb;
        const double jterm = perp(A.dV, j, k) * dvb;
        radial += p.w * (hv[0] * om[0] + hv[1] * om[1] + perp(A.dV, j, k)) * dvb;
        trans += p.w * (hv[0] * op[0] + hv[1] * op[1]) * dvb;
        cancel += p.w * jterm;
        cancel_scale = std::max(cancel_scale, std::abs(p.w * jterm));
      }
    }
    for (int m = 0; m < 2; ++m) {
      rf2.add(f2[m], radial * om[m] + trans * op[m], {radial, trans});
    }
    rcancel.err = std::max(rcancel.err, std::abs(cancel));
    rcancel.scale = std::max(rcancel.scale, cancel_scale);
  }
}

/// Radial, vector and swap splits for one pair: A = U^(alpha,a), B = U.
void pair_identities(const Gradients& A, const Hessians& B2, const Gradients& B,
                     const GeometryWeights& geo, Residual& rsplit, Residual& rvec, Residual& rswap) {
  const std::size_t size = geo.grid.size();
  const double h = geo.grid.spacing();
  const auto& dV = B2.d[0];
  for (std::size_t k = 0; k < size; ++k) {
    if (geo.radius(k) < h) continue;
    const double om[2] = {geo.omega1[k], geo.omega2[k]};
    const double op[2] = {-om[1], om[0]};
    auto dot = [](const double* u, const double* v) { return u[0] * v[0] + u[1] * v[1]; };
    for (int i = 0; i < 2; ++i) {
      const double ha[2] = {A.dH[0][i][k], A.dH[1][i][k]};
      const double va = A.dV[i][k];
      for (int kk = 0; kk < 2; ++kk) {
        for (int j = 0; j < 2; ++j) {
          const double hb[2] = {B2.d[1][kk][j][k], B2.d[2][kk][j][k]};
          const double vb = dV[kk][j][k];
          const double lhs = dot(ha, hb) - va * vb;
          const double t1 = (va + dot(ha, om)) * dot(hb, om);
          const double t2 = -va * (vb + dot(hb, om));
          const double t3 = dot(ha, op) * dot(hb, op);
          rsplit.add(lhs, t1 + t2 + t3, {t1, t2, t3});
        }
      }
    }
    for (int kk = 0; kk < 2; ++kk) {
      // W_i = sum_j gp_j H^A_i d_k d_j V + d_k gp_j H_i d_j V^A
      // with d_k gp_1 f = -d_k d_2 f and d_k gp_2 f = d_k d_1 f.
      auto dk_perp = [&](int c, int j) {
        return j == 0 ? -B2.d[c][kk][1][k] : B2.d[c][kk][0][k];
      };
      double W[2] = {0.0, 0.0};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          W[i] += perp(A.dH[i], j, k) * dV[kk][j][k] + dk_perp(1 + i, j) * A.dV[j][k];
        }
      }
      const double hk[2] = {A.dH[0][kk][k], A.dH[1][kk][k]};
      const double lhs_vec = dot(W, hk);
      const double a_vec = dot(W, om) * dot(hk, om);
      const double b_vec = dot(W, op) * dot(hk, op);
      rvec.add(lhs_vec, a_vec + b_vec, {a_vec, b_vec});

      double lhs_swap = 0.0;
      double rhs_swap = 0.0;
      double big = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double hpa[2] = {perp(A.dH[0], j, k), perp(A.dH[1], j, k)};
        const double dkhp[2] = {dk_perp(1, j), dk_perp(2, j)};
        const double x1 = dot(hpa, om) * dV[kk][j][k];
        const double x2 = dot(dkhp, om) * A.dV[j][k];
        const double y1 = (dot(hpa, om) + perp(A.dV, j, k)) * dV[kk][j][k];
        const double y2 = (dot(dkhp, om) + dk_perp(0, j)) * A.dV[j][k];
        lhs_swap += x1 + x2;
        rhs_swap += y1 + y2;
        big = std::max({big, std::abs(x1), std::abs(x2), std::abs(y1), std::abs(y2)});
      }
      rswap.add(lhs_swap, rhs_swap, {big});
    }
  }
  (void)B;
}

/// Polar gradient on a scalar: grad f against omega d_r f + omega^perp / r * Omega f.
void gradient_identity(const Spectrum& f, const GeometryWeights& geo, Residual& res) {
  const ScalarField d1 = to_physical(derivative(f, 1));
  const ScalarField d2 = to_physical(derivative(f, 2));
  const ScalarField rot = to_physical(rotation(f));
  const double cutoff = 4.0 * geo.grid.spacing();
  for (std::size_t k = 0; k < d1.size(); ++k) {
    if (geo.radius(k) < cutoff) continue;
    const double om[2] = {geo.omega1[k], geo.omega2[k]};
    const double op[2] = {-om[1], om[0]};
    const double dr = om[0] * d1[k] + om[1] * d2[k];
    const double ang = rot[k] / geo.r[k];
    res.add(d1[k], om[0] * dr + op[0] * ang, {dr, ang});
    res.add(d2[k], om[1] * dr + op[1] * ang, {dr, ang});
  }
}

void linear_identities(const Spectrum& f, Residual& perp_res, Residual& riesz_res) {
  Spectrum pc = perp_derivative(derivative(f, 1), 1);
  pc += perp_derivative(derivative(f, 2), 2);
  const ScalarField lap = to_physical(laplacian(f));
  perp_res.err = std::max(perp_res.err, linf_norm(to_physical(pc)));
  perp_res.scale = std::max(perp_res.scale, linf_norm(lap));

  Spectrum tr = riesz_pp(1, 1, f);
  tr += riesz_pp(2, 2, f);
  riesz_res.err = std::max(riesz_res.err, linf_norm(to_physical(tr)));
  riesz_res.scale = std::max(riesz_res.scale, linf_norm(to_physical(riesz_pp(1, 2, f))));
  riesz_res.scale = std::max(riesz_res.scale, linf_norm(to_physical(f)));
}

IdentityReport finish(const Residual& rsplit, const Residual& rf2, const Residual& rpolar,
                      const Residual& rc, const Residual& rp, const Residual& rr,
                      const Residual& rvec, const Residual& rswap) {
  IdentityReport out;
  out.radial_split = rsplit.relative();
  out.f2_split = rf2.relative();
  out.polar_gradient = rpolar.relative();
  out.binomial_cancel = rc.relative();
  out.perp_cancel = rp.relative();
  out.riesz_trace = rr.relative();
  out.vector_split = rvec.relative();
  out.perp_swap = rswap.relative();
  return out;
}

double quad_masked(const ScalarField& f, const GeometryWeights& geo) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (geo.mask[k]) acc += f[k] * f[k];
  }
  return acc * cell(geo.grid);
}

}  // namespace

Energies energies(const DerivedFamily& fam) {
  const int km = fam.k_max();
  Energies out{std::vector<double>(km + 1, 0.0), std::vector<double>(km + 2, 0.0)};
  for (const MultiIndex& idx : fam.indices()) {
    const FamilyEntry& e = fam[idx];
    const double e0 = l2_norm_sq(e.V) + l2_norm_sq(e.H);
    const Gradients& g = fam.gradients(idx);
    double e1 = 0.0;
    for (int l = 0; l < 2; ++l) {
      e1 += l2_norm_sq(g.dV[l]) + l2_norm_sq(g.dH[0][l]) + l2_norm_sq(g.dH[1][l]);
    }
    for (int k = idx.order(); k <= km; ++k) out.E[k] += e0;
    for (int k = idx.order() + 1; k <= km + 1; ++k) out.calE[k] += e1;
  }
  return out;
}

WeightedNorms weighted_norms(const DerivedFamily& fam, const GeometryWeights& w) {
  require_same_grid(fam.grid(), w.grid);
  const int km = fam.k_max();
  WeightedNorms out{std::vector<double>(km + 2, 0.0), std::vector<double>(km + 2, 0.0),
                    std::vector<double>(km + 2, 0.0), std::vector<double>(km + 2, 0.0)};
  const std::size_t size = w.grid.size();
  const double dA = cell(w.grid);
  for (const MultiIndex& idx : fam.indices()) {
    const Gradients& g = fam.gradients(idx);
    double X = 0.0, Y = 0.0, G = 0.0, Gp = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      const double om[2] = {w.omega1[k], w.omega2[k]};
      const double op[2] = {-om[1], om[0]};
      const double x[2] = {w.x1(k), w.x2(k)};
      double grad2 = 0.0;
      for (int l = 0; l < 2; ++l) {
        grad2 += sq(g.dV[l][k]) + sq(g.dH[0][l][k]) + sq(g.dH[1][l][k]);
      }
      X += sq(bracket(w.sigma[k])) * grad2;

      const double rv = x[0] * g.dV[0][k] + x[1] * g.dV[1][k];
      const double rh[2] = {x[0] * g.dH[0][0][k] + x[1] * g.dH[0][1][k],
                            x[0] * g.dH[1][0][k] + x[1] * g.dH[1][1][k]};
      Y += sq(rv + rh[0] * om[0] + rh[1] * om[1]) + sq(rh[0] * op[0] + rh[1] * op[1]);

      double good = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double hi[2] = {g.dH[0][i][k], g.dH[1][i][k]};
        good += sq(g.dV[i][k] + hi[0] * om[0] + hi[1] * om[1]) + sq(hi[0] * op[0] + hi[1] * op[1]);
      }
      const double kern = good / sq(bracket(w.sigma[k]));
      G += kern * w.ghost[k];
      Gp += kern;
    }
    for (int kk = idx.order() + 1; kk <= km + 1; ++kk) {
      out.X[kk] += X * dA;
      out.Y[kk] += Y * dA;
      out.G[kk] += G * dA;
      out.G_plain[kk] += Gp * dA;
    }
  }
  return out;
}

GoodUnknownNorms good_unknown_norms(const DerivedFamily& fam, const GeometryWeights& w,
                                    int max_order) {
  require_same_grid(fam.grid(), w.grid);
  if (w.mask_count == 0) {
    throw InvalidArgument("the light-cone region r >= <t>/2 contains no grid point");
  }
  GoodUnknownNorms out;
  const std::size_t size = w.grid.size();
  for (const MultiIndex& idx : fam.indices()) {
    if (max_order >= 0 && idx.order() > max_order) continue;
    const Gradients& g = fam.gradients(idx);
    double sup = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      if (!w.mask[k]) continue;
      const double om[2] = {w.omega1[k], w.omega2[k]};
      for (int i = 0; i < 2; ++i) {
        const double hi[2] = {g.dH[0][i][k], g.dH[1][i][k]};
        const double val = std::abs(g.dV[i][k] + hi[0] * om[0] + hi[1] * om[1]) +
                           std::abs(-hi[0] * om[1] + hi[1] * om[0]);
        sup = std::max(sup, val);
      }
    }
    out.per_index.emplace_back(idx, sup);
    out.summed += sup;
  }
  const Gradients& g0 = fam.gradients(MultiIndex{});
  for (int l = 0; l < 2; ++l) {
    out.gradient_sup = std::max({out.gradient_sup, linf_norm(g0.dV[l]), linf_norm(g0.dH[0][l]),
                                 linf_norm(g0.dH[1][l])});
  }
  return out;
}

double IdentityReport::max_exact() const noexcept {
  return std::max({radial_split, f2_split, binomial_cancel, perp_cancel, riesz_trace, vector_split, perp_swap});
}

IdentityReport identity_checks(const FamilyEntry& a, const FamilyEntry& b,
                               const GeometryWeights& w) {
  require_same_grid(a.V.grid(), w.grid);
  require_same_grid(b.V.grid(), w.grid);
  const SpectralU ua = spectral_of(a);
  const SpectralU ub = spectral_of(b);
  const Gradients ga(ua);
  const Gradients gb(ub);
  const Hessians hb(ub);

  Residual rsplit, rf2, rpolar, rc, rp, rr, rvec, rswap;
  pair_identities(ga, hb, gb, w, rsplit, rvec, rswap);
  binomial_identities({{1.0, &ga, &gb}, {1.0, &gb, &ga}}, w, rf2, rc);
  for (const Spectrum* s : {&ua.V, &ua.H[0], &ua.H[1], &ub.V}) {
    gradient_identity(*s, w, rpolar);
    linear_identities(*s, rp, rr);
  }
  return finish(rsplit, rf2, rpolar, rc, rp, rr, rvec, rswap);
}

IdentityReport identity_checks(const DerivedFamily& fam, const GeometryWeights& w) {
  require_same_grid(fam.grid(), w.grid);
  const MultiIndex base{};
  const Hessians hb(fam.jet(base)[0]);
  const Gradients& gb = fam.gradients(base);

  Residual rsplit, rf2, rpolar, rc, rp, rr, rvec, rswap;
  for (const MultiIndex& idx : fam.indices()) {
    pair_identities(fam.gradients(idx), hb, gb, w, rsplit, rvec, rswap);

    std::vector<Weighted> pairs;
    for (const MultiIndex& sub : fam.indices()) {
      const double wt = binomial_weight(idx, sub);
      if (wt == 0.0) continue;
      MultiIndex rest;
      rest.alpha = idx.alpha - sub.alpha;
      for (int i = 0; i < 4; ++i) rest.a[i] = idx.a[i] - sub.a[i];
      pairs.push_back({wt, &fam.gradients(sub), &fam.gradients(rest)});
    }
    binomial_identities(pairs, w, rf2, rc);
  }
  const SpectralU& u0 = fam.jet(base)[0];
  for (const Spectrum* s : {&u0.V, &u0.H[0], &u0.H[1]}) {
    gradient_identity(*s, w, rpolar);
    linear_identities(*s, rp, rr);
  }
  return finish(rsplit, rf2, rpolar, rc, rp, rr, rvec, rswap);
}

double InequalityRatios::sobolev_max() const noexcept {
  return std::max({sobolev_r, sobolev_weighted, sobolev_interior});
}

double InequalityRatios::nonlinear_max() const noexcept {
  return std::max({f2_bound, f3_bound, div_f2_bound, fij_bound});
}

InequalityRatios sobolev_ratios(const ScalarField& f, const GeometryWeights& w) {
  require_same_grid(f.grid(), w.grid);
  constexpr double kFloor = 1e-30;
  const Grid& g = w.grid;
  const std::size_t size = g.size();
  const double dA = cell(g);
  const Spectrum fs = to_spectral(f);
  const Spectrum rs = rotation(fs);
  const ScalarField rot = to_physical(rs);

  auto radial_of = [&](const Spectrum& s) {
    ScalarField d1 = to_physical(derivative(s, 1));
    const ScalarField d2 = to_physical(derivative(s, 2));
    for (std::size_t k = 0; k < size; ++k) d1[k] = w.omega1[k] * d1[k] + w.omega2[k] * d2[k];
    return d1;
  };
  const ScalarField dr0 = radial_of(fs);
  const ScalarField dr1 = radial_of(rs);

  double rhs1 = 0.0, rhs2 = 0.0, lhs1 = 0.0, lhs2 = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double terms = sq(dr0[k]) + sq(f[k]) + sq(dr1[k]) + sq(rot[k]);
    const double wt = 1.0 + sq(w.t - w.r[k]);
    rhs1 += terms;
    rhs2 += wt * terms;
    const double rf2 = w.radius(k) * sq(f[k]);
    lhs1 = std::max(lhs1, rf2);
    lhs2 = std::max(lhs2, wt * rf2);
  }
  rhs1 *= dA;
  rhs2 *= dA;

  // <t> sup_{r <= t/2} |f| against sum over |a| <= 2 of ||<t - r> d^a f||.
  double sup_in = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    if (w.radius(k) <= 0.5 * w.t) sup_in = std::max(sup_in, std::abs(f[k]));
  }
  const Spectrum d1 = derivative(fs, 1);
  const Spectrum d2 = derivative(fs, 2);
  double rhs3 = 0.0;
  for (const Spectrum& s : {fs, d1, d2, derivative(d1, 1), derivative(d1, 2), derivative(d2, 2)}) {
    const ScalarField p = to_physical(s);
    double acc = 0.0;
    for (std::size_t k = 0; k < size; ++k) acc += (1.0 + sq(w.t - w.r[k])) * sq(p[k]);
    rhs3 += std::sqrt(acc * dA);
  }

  InequalityRatios out;
  out.sobolev_r = lhs1 / std::max(rhs1, kFloor);
  out.sobolev_weighted = lhs2 / std::max(rhs2, kFloor);
  out.sobolev_interior = w.bracket_t() * sup_in / std::max(rhs3, kFloor);
  return out;
}

namespace {

/// Sum of |V| (or |H|) over entries with alpha <= p and |a| <= q.
class LevelSums {
 public:
  LevelSums(const DerivedFamily& fam) : fam_(fam) {}

  const ScalarField& V(int p, int q) { return get(p, q, true); }
  const ScalarField& H(int p, int q) { return get(p, q, false); }

 private:
  const ScalarField& get(int p, int q, bool v) {
    const auto key = std::make_tuple(p, q, v);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ScalarField acc(fam_.grid());
    for (const MultiIndex& idx : fam_.indices()) {
      if (idx.alpha > p || idx.order() - idx.alpha > q) continue;
      const FamilyEntry& e = fam_[idx];
      for (std::size_t k = 0; k < acc.size(); ++k) {
        acc[k] += v ? std::abs(e.V[k]) : std::hypot(e.H[0][k], e.H[1][k]);
      }
    }
    return cache_.emplace(key, std::move(acc)).first->second;
  }

  const DerivedFamily& fam_;
  std::map<std::tuple<int, int, bool>, ScalarField> cache_;
};

double masked_ratio(const ScalarField& lhs, const ScalarField& rhs, const GeometryWeights& w) {
  return std::sqrt(quad_masked(lhs, w)) / std::max(std::sqrt(quad_masked(rhs, w)), 1e-30);
}

}  // namespace

InequalityRatios inequality_ratios(const DerivedFamily& fam, const GeometryWeights& w) {
  require_same_grid(fam.grid(), w.grid);
  InequalityRatios out;
  for (const MultiIndex& idx : fam.indices()) {
    const FamilyEntry& e = fam[idx];
    for (const ScalarField* f : {&e.V, &e.H[0], &e.H[1]}) {
      const InequalityRatios s = sobolev_ratios(*f, w);
      out.sobolev_r = std::max(out.sobolev_r, s.sobolev_r);
      out.sobolev_weighted = std::max(out.sobolev_weighted, s.sobolev_weighted);
      out.sobolev_interior = std::max(out.sobolev_interior, s.sobolev_interior);
    }
  }

  const Grid& g = fam.grid();
  const std::size_t size = g.size();
  LevelSums L(fam);
  for (const MultiIndex& idx : fam.indices()) {
    const int o = idx.order();
    if (o > fam.k_max() - 1) continue;
    const int al = idx.alpha;
    const int A = o - al;
    const NonlinearityTerms f = nonlinearity_f(fam, idx);

    ScalarField rhs2(g), rhs3(g), rhs_ij(g);
    for (int be = 0; be <= al; ++be) {
      for (int ga = 0; be + ga <= al; ++ga) {
        for (int b = 0; b <= A; ++b) {
          for (int c = 0; b + c <= A; ++c) {
            const ScalarField& vb = L.V(be, b + 1);
            const ScalarField& vg = L.V(ga, c + 1);
            const ScalarField& hb = L.H(be, b + 1);
            const ScalarField& hg = L.H(ga, c + 1);
            for (std::size_t k = 0; k < size; ++k) {
              rhs2[k] += vb[k] * hg[k];
              rhs3[k] += hb[k] * hg[k];
              rhs_ij[k] += vb[k] * vg[k] + hb[k] * hg[k];
            }
          }
        }
      }
    }
    for (std::size_t k = 0; k < size; ++k) {
      rhs2[k] /= w.r[k];
      rhs3[k] /= w.r[k];
      rhs_ij[k] /= w.r[k];
    }

    // Good-unknown part of the f^{ij} bound: exact pairs, no binomial weights.
    for (const MultiIndex& sub : fam.indices()) {
      if (binomial_weight(idx, sub) == 0.0) continue;
      MultiIndex rest;
      rest.alpha = idx.alpha - sub.alpha;
      for (int i = 0; i < 4; ++i) rest.a[i] = idx.a[i] - sub.a[i];
      const Gradients& B = fam.gradients(sub);
      const Gradients& C = fam.gradients(rest);
      for (std::size_t k = 0; k < size; ++k) {
        const double om[2] = {w.omega1[k], w.omega2[k]};
        const double op[2] = {-om[1], om[0]};
        auto dr = [&](const std::array<ScalarField, 2>& d) { return om[0] * d[0][k] + om[1] * d[1][k]; };
        const double brH[2] = {dr(B.dH[0]), dr(B.dH[1])};
        const double crH[2] = {dr(C.dH[0]), dr(C.dH[1])};
        const double good = std::abs(dr(B.dV) + brH[0] * om[0] + brH[1] * om[1]);
        const double gradC = std::hypot(C.dV[0][k], C.dV[1][k]) +
                             std::sqrt(sq(C.dH[0][0][k]) + sq(C.dH[0][1][k]) + sq(C.dH[1][0][k]) +
                                       sq(C.dH[1][1][k]));
        const double trans = std::abs((brH[0] * op[0] + brH[1] * op[1]) *
                                      (crH[0] * op[0] + crH[1] * op[1]));
        rhs_ij[k] += good * gradC + trans;
      }
    }

    ScalarField lhs2(g), lhs3(g), lhs_ij(g);
    for (std::size_t k = 0; k < size; ++k) {
      lhs2[k] = std::hypot(f.f2[0][k], f.f2[1][k]);
      lhs3[k] = std::abs(f.f3[k]);
      double m = 0.0;
      for (const ScalarField& fij : f.fij) m = std::max(m, std::abs(fij[k]));
      lhs_ij[k] = m;
    }
    out.f2_bound = std::max(out.f2_bound, masked_ratio(lhs2, rhs2, w));
    out.f3_bound = std::max(out.f3_bound, masked_ratio(lhs3, rhs3, w));
    out.fij_bound = std::max(out.fij_bound, masked_ratio(lhs_ij, rhs_ij, w));

    if (o <= fam.k_max() - 2) {
      Spectrum div = derivative(to_spectral(f.f2[0]), 1);
      div += derivative(to_spectral(f.f2[1]), 2);
      const ScalarField lhs = to_physical(div);
      ScalarField rhs(g);
      for (int be = 0; be <= al; ++be) {
        for (int ga = 0; be + ga <= al; ++ga) {
          for (int b = 0; b <= A; ++b) {
            for (int c = 0; b + c <= A; ++c) {
              const ScalarField& vb = L.V(be, b + 2);
              const ScalarField& hg = L.H(ga, c + 2);
              for (std::size_t k = 0; k < size; ++k) rhs[k] += vb[k] * hg[k] / w.r[k];
            }
          }
        }
      }
      ScalarField lhs_abs(g);
      for (std::size_t k = 0; k < size; ++k) lhs_abs[k] = std::abs(lhs[k]);
      out.div_f2_bound = std::max(out.div_f2_bound, masked_ratio(lhs_abs, rhs, w));
    }
  }
  return out;
}

DiagnosticsRecord diagnose(const DerivedFamily& fam, const VectorField2& base_H) {
  const GeometryWeights w(fam.grid(), fam.time());
  DiagnosticsRecord rec;
  rec.t = fam.time();
  rec.mu = fam.mu();
  rec.energy = energies(fam);
  rec.weighted = weighted_norms(fam, w);
  const GoodUnknownNorms good = good_unknown_norms(fam, w);
  rec.good_sup = good.summed;
  rec.gradient_sup = good.gradient_sup;
  const ConstraintResidual c = constraint_residual(base_H);
  rec.constraint_l2 = c.l2;
  rec.constraint_linf = c.linf;
  rec.identities = identity_checks(fam, w);
  return rec;
}

const std::string& csv_header() {
  static const std::string header =
      "t,mu,E0,E1,E2,calE1,calE2,X1,X2,Y1,Y2,G1,G2,good_sup,constraint_L2,constraint_Linf,"
      "id45_res,id417_res,id218_res";
  return header;
}

std::string csv_row(const DiagnosticsRecord& r) {
  if (r.energy.E.size() < 3) throw InvalidArgument("CSV rows need k_max >= 2");
  const double values[] = {r.t,
                           r.mu,
                           r.energy.E[0],
                           r.energy.E[1],
                           r.energy.E[2],
                           r.energy.calE[1],
                           r.energy.calE[2],
                           r.weighted.X[1],
                           r.weighted.X[2],
                           r.weighted.Y[1],
                           r.weighted.Y[2],
                           r.weighted.G[1],
                           r.weighted.G[2],
                           r.good_sup,
                           r.constraint_l2,
                           r.constraint_linf,
                           r.identities.radial_split,
                           r.identities.f2_split,
                           r.identities.polar_gradient};
  std::string row;
  char buf[32];
  for (std::size_t i = 0; i < std::size(values); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    if (i) row += ',';
    row += buf;
  }
  return row;
}

}  // namespace ve2d
