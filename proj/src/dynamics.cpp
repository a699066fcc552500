#include "ve2d/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ve2d/error.hpp"
#include "ve2d/fft.hpp"
#include "ve2d/spectral.hpp"

namespace ve2d {

void StepperConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be >= 0 (0 = automatic)");
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) {
    throw InvalidArgument("cfl_factor must lie in (0, 1]");
  }
}

namespace {

using Bundle = std::vector<Spectrum>;
using RhsFn = std::function<Bundle(const Bundle&)>;

void axpy(Bundle& y, double a, const Bundle& x) {
  for (std::size_t c = 0; c < y.size(); ++c) y[c].axpy(a, x[c]);
}

/// Multiplies the viscous components by exp(-mu |k|^2 tau).
class ViscousFactor {
 public:
  ViscousFactor(const Grid& g, double mu, double tau) : factor_(g.spectral_size(), 1.0) {
    if (mu == 0.0) return;
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1) {
      const double k1 = g.wavenumber(g.mode(p1));
      for (int p2 = 0; p2 <= n / 2; ++p2) {
        const double k2 = g.wavenumber(p2);
        factor_[g.spectral_index(p1, p2)] = std::exp(-mu * (k1 * k1 + k2 * k2) * tau);
      }
    }
  }

  void apply(Bundle& u, const std::vector<bool>& viscous) const {
    for (std::size_t c = 0; c < u.size(); ++c) {
      if (!viscous[c]) continue;
      Complex* d = u[c].data();
      for (std::size_t k = 0; k < factor_.size(); ++k) d[k] *= factor_[k];
    }
  }

  Bundle operator()(Bundle u, const std::vector<bool>& viscous) const {
    apply(u, viscous);
    return u;
  }

 private:
  std::vector<double> factor_;
};

// N excludes viscosity, which is integrated exactly.
Bundle if_rk4(const Bundle& u, double h, double mu, const std::vector<bool>& viscous,
              const RhsFn& N) {
  const Grid& g = u[0].grid();
  const ViscousFactor half(g, mu, 0.5 * h);
  const ViscousFactor full(g, mu, h);

  const Bundle a = N(u);
  Bundle ua = u;
  axpy(ua, 0.5 * h, a);
  half.apply(ua, viscous);
  const Bundle b = N(ua);

  const Bundle eu_half = half(u, viscous);
  Bundle ub = eu_half;
  axpy(ub, 0.5 * h, b);
  const Bundle c = N(ub);

  Bundle uc = full(u, viscous);
  axpy(uc, h, half(c, viscous));
  const Bundle d = N(uc);

  Bundle out = full(u, viscous);
  Bundle mid = b;
  axpy(mid, 1.0, c);
  axpy(out, h / 6.0, full(a, viscous));
  axpy(out, h / 3.0, half(mid, viscous));
  axpy(out, h / 6.0, d);
  return out;
}

// ARS(2,2,2): stiffly accurate, L-stable implicit part for -mu|k|^2.
Bundle imex_ars222(const Bundle& u, double h, double mu, const std::vector<bool>& viscous,
                   const RhsFn& N) {
  const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
  const double delta = 1.0 - 1.0 / (2.0 * gamma);
  const Grid& g = u[0].grid();
  const int n = g.n();
  std::vector<double> kk(g.spectral_size());
  for (int p1 = 0; p1 < n; ++p1) {
    const double k1 = g.wavenumber(g.mode(p1));
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      kk[g.spectral_index(p1, p2)] = k1 * k1 + k2 * k2;
    }
  }
  auto solve = [&](Bundle& w) {
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (!viscous[c] || mu == 0.0) continue;
      Complex* d = w[c].data();
      for (std::size_t k = 0; k < kk.size(); ++k) d[k] /= 1.0 + h * gamma * mu * kk[k];
    }
  };
  auto lin = [&](const Bundle& w) {
    Bundle out = w;
    for (std::size_t c = 0; c < out.size(); ++c) {
      Complex* d = out[c].data();
      for (std::size_t k = 0; k < kk.size(); ++k) {
        d[k] *= (viscous[c] ? -mu * kk[k] : 0.0);
      }
    }
    return out;
  };

  const Bundle n0 = N(u);
  Bundle u2 = u;
  axpy(u2, h * gamma, n0);
  solve(u2);

  const Bundle n2 = N(u2);
  Bundle u3 = u;
  axpy(u3, h * delta, n0);
  axpy(u3, h * (1.0 - delta), n2);
  axpy(u3, h * (1.0 - gamma), lin(u2));
  solve(u3);
  return u3;
}

Bundle advance_bundle(const Bundle& u, double h, double mu, const std::vector<bool>& viscous,
                      const RhsFn& N, Scheme scheme) {
  return scheme == Scheme::ImexRK ? imex_ars222(u, h, mu, viscous, N)
                                  : if_rk4(u, h, mu, viscous, N);
}

bool bundle_finite(const Bundle& u) {
  for (const auto& s : u) {
    for (const Complex& c : s.coeffs()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  return true;
}

// ||f||^2 + ||grad f||^2 by Parseval.
double h1_norm_sq(const Spectrum& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  double acc = 0.0;
  for (int p1 = 0; p1 < n; ++p1) {
    const double k1 = g.wavenumber(g.mode(p1));
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double k2 = g.wavenumber(p2);
      const double w = (p2 == 0 || p2 == n / 2) ? 1.0 : 2.0;
      acc += w * (1.0 + k1 * k1 + k2 * k2) * std::norm(s(p1, p2));
    }
  }
  return acc * g.box_len() * g.box_len();
}

SpectralU to_u(const Bundle& b) { return SpectralU(b[0], b[1], b[2]); }
Bundle to_bundle(const SpectralU& u) { return {u.V, u.H[0], u.H[1]}; }

SpectralU potential_rhs_spectral(const SpectralU& u, double mu, bool viscous,
                                 const TermSwitches& sw) {
  SpectralU out = linear_part(u, mu, viscous, sw);
  if (sw.nonlinear) {
    const Gradients grad(u);
    out += quadratic_form(grad, grad, sw.dealias);
  }
  return out;
}

// Components: v1, v2, G11, G12, G21, G22 with G(i, j) at 2 + 2i + j.
Bundle primitive_rhs_spectral(const Bundle& u, double mu, bool viscous, const TermSwitches& sw) {
  const Grid& g = u[0].grid();
  const std::size_t size = g.size();
  auto gi = [](int i, int j) { return 2 + 2 * i + j; };

  Bundle out(6, Spectrum(g));
  std::array<Spectrum, 2> dv_hat{Spectrum(g), Spectrum(g)};
  for (int i = 0; i < 2; ++i) {
    if (viscous && mu != 0.0) dv_hat[i].axpy(mu, laplacian(u[i]));
    if (sw.coupling) {
      dv_hat[i] += derivative(u[gi(i, 0)], 1);
      dv_hat[i] += derivative(u[gi(i, 1)], 2);
      for (int j = 0; j < 2; ++j) out[gi(i, j)] += derivative(u[i], j + 1);
    }
  }

  if (sw.nonlinear) {
    std::array<ScalarField, 2> v{to_physical(u[0]), to_physical(u[1])};
    std::vector<ScalarField> G;
    for (int c = 2; c < 6; ++c) G.push_back(to_physical(u[c]));
    // dv_phys[i][l] = d_l v_i; dG_phys[c][l] = d_l G_c
    std::array<std::array<ScalarField, 2>, 2> dv{
        {{to_physical(derivative(u[0], 1)), to_physical(derivative(u[0], 2))},
         {to_physical(derivative(u[1], 1)), to_physical(derivative(u[1], 2))}}};
    std::vector<std::array<ScalarField, 2>> dG;
    for (int c = 2; c < 6; ++c) {
      dG.push_back({to_physical(derivative(u[c], 1)), to_physical(derivative(u[c], 2))});
    }

    ScalarField prod(g);
    for (int i = 0; i < 2; ++i) {
      // -v.grad v_i
      for (std::size_t k = 0; k < size; ++k) {
        prod[k] = -(v[0][k] * dv[i][0][k] + v[1][k] * dv[i][1][k]);
      }
      Spectrum adv = to_spectral(prod);
      if (sw.dealias) dealias_in_place(adv);
      dv_hat[i] += adv;
      // d_j (G_ik G_jk)
      for (int j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < size; ++k) {
          prod[k] = G[2 * i][k] * G[2 * j][k] + G[2 * i + 1][k] * G[2 * j + 1][k];
        }
        Spectrum m = to_spectral(prod);
        if (sw.dealias) dealias_in_place(m);
        dv_hat[i] += derivative(m, j + 1);
      }
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const int c = 2 * i + j;
        for (std::size_t k = 0; k < size; ++k) {
          prod[k] = -(v[0][k] * dG[c][0][k] + v[1][k] * dG[c][1][k]) +
                    dv[i][0][k] * G[j][k] + dv[i][1][k] * G[2 + j][k];
        }
        Spectrum s = to_spectral(prod);
        if (sw.dealias) dealias_in_place(s);
        out[gi(i, j)] += s;
      }
    }
  }

  // Leray projection in spectral space.
  const int n = g.n();
  for (int p1 = 0; p1 < n; ++p1) {
    const int m1 = g.mode(p1);
    const double q1 = (m1 == -n / 2) ? 0.0 : g.wavenumber(m1);
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double q2 = (p2 == n / 2) ? 0.0 : g.wavenumber(p2);
      const double qq = q1 * q1 + q2 * q2;
      const std::size_t idx = g.spectral_index(p1, p2);
      Complex a = dv_hat[0].data()[idx];
      Complex b = dv_hat[1].data()[idx];
      if (qq != 0.0) {
        const Complex dot = (q1 * a + q2 * b) / qq;
        a -= q1 * dot;
        b -= q2 * dot;
      }
      out[0].data()[idx] = a;
      out[1].data()[idx] = b;
    }
  }
  return out;
}

double linf_norm_speed(const VectorField2& v) {
  double m = 0.0;
  for (std::size_t k = 0; k < v[0].size(); ++k) m = std::max(m, std::hypot(v[0][k], v[1][k]));
  return m;
}

double max_speed(const Spectrum& vel1, const Spectrum& vel2) {
  const ScalarField a = to_physical(vel1);
  const ScalarField b = to_physical(vel2);
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::hypot(a[k], b[k]));
  return m;
}

double dt_from_speed(const Grid& g, double speed, const StepperConfig& c) {
  return c.cfl_factor * g.spacing() / (1.0 + speed);
}

void check_dt(double dt, double limit) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " exceeds the stable limit " << limit;
    throw InvalidArgument(msg.str());
  }
}

[[noreturn]] void blow_up(const char* why, double t) {
  std::ostringstream msg;
  msg << why << " at t = " << t;
  throw BlowUpError(msg.str(), t);
}

Bundle primitive_bundle(const PrimitiveState& p) {
  return {to_spectral(p.v[0]),    to_spectral(p.v[1]),    to_spectral(p.G(0, 0)),
          to_spectral(p.G(0, 1)), to_spectral(p.G(1, 0)), to_spectral(p.G(1, 1))};
}

PrimitiveState primitive_from_bundle(const Bundle& u, double t, double mu) {
  return PrimitiveState{
      VectorField2(to_physical(u[0]), to_physical(u[1])),
      Tensor2(to_physical(u[2]), to_physical(u[3]), to_physical(u[4]), to_physical(u[5])), t,
      mu};
}

const std::vector<bool> kPotentialViscous{true, false, false};
const std::vector<bool> kPrimitiveViscous{true, true, false, false, false, false};

}  // namespace

PotentialRhs rhs_potential(const PotentialState& s, const TermSwitches& sw) {
  const SpectralU r = potential_rhs_spectral(SpectralU::from_state(s), s.mu, true, sw);
  return {to_physical(r.V), VectorField2(to_physical(r.H[0]), to_physical(r.H[1]))};
}

PrimitiveRhs rhs_primitive(const PrimitiveState& p, const TermSwitches& sw) {
  const Bundle r = primitive_rhs_spectral(primitive_bundle(p), p.mu, true, sw);
  const PrimitiveState out = primitive_from_bundle(r, p.t, p.mu);
  return {out.v, out.G};
}

double choose_dt(const PotentialState& s, const StepperConfig& c) {
  c.validate();
  return dt_from_speed(s.grid(), linf_norm_speed(velocity_of(s.V)), c);
}

double choose_dt(const PrimitiveState& p, const StepperConfig& c) {
  c.validate();
  return dt_from_speed(p.grid(), linf_norm_speed(p.v), c);
}

PotentialState step(const PotentialState& s, const StepperConfig& c) {
  validate_viscosity(s.mu);
  const double limit = choose_dt(s, c);
  const double dt = c.dt > 0.0 ? c.dt : limit;
  check_dt(dt, limit);
  const TermSwitches sw = c.switches();
  const double mu = s.mu;
  const RhsFn N = [mu, sw](const Bundle& b) {
    return to_bundle(potential_rhs_spectral(to_u(b), mu, false, sw));
  };
  const Bundle u = advance_bundle(to_bundle(SpectralU::from_state(s)), dt, mu, kPotentialViscous,
                                  N, c.scheme);
  if (!bundle_finite(u)) blow_up("non-finite state", s.t + dt);
  return PotentialState{to_physical(u[0]), VectorField2(to_physical(u[1]), to_physical(u[2])),
                        s.t + dt, mu};
}

PrimitiveState step(const PrimitiveState& p, const StepperConfig& c) {
  validate_viscosity(p.mu);
  const double limit = choose_dt(p, c);
  const double dt = c.dt > 0.0 ? c.dt : limit;
  check_dt(dt, limit);
  const TermSwitches sw = c.switches();
  const double mu = p.mu;
  const RhsFn N = [mu, sw](const Bundle& b) { return primitive_rhs_spectral(b, mu, false, sw); };
  const Bundle u = advance_bundle(primitive_bundle(p), dt, mu, kPrimitiveViscous, N, c.scheme);
  if (!bundle_finite(u)) blow_up("non-finite state", p.t + dt);
  return primitive_from_bundle(u, p.t + dt, mu);
}

PotentialIntegrator::PotentialIntegrator(const PotentialState& s, StepperConfig c)
    : u_(SpectralU::from_state(s)), t_(s.t), mu_(s.mu), config_(c), initial_energy_(0.0) {
  validate_viscosity(mu_);
  config_.validate();
  initial_energy_ = energy();
}

PotentialState PotentialIntegrator::state() const {
  return PotentialState{to_physical(u_.V),
                        VectorField2(to_physical(u_.H[0]), to_physical(u_.H[1])), t_, mu_};
}

double PotentialIntegrator::energy() const {
  return h1_norm_sq(u_.V) + h1_norm_sq(u_.H[0]) + h1_norm_sq(u_.H[1]);
}

double PotentialIntegrator::next_dt() const {
  const double limit =
      dt_from_speed(u_.grid(), max_speed(perp_derivative(u_.V, 1), perp_derivative(u_.V, 2)),
                    config_);
  if (config_.dt > 0.0) {
    check_dt(config_.dt, limit);
    return config_.dt;
  }
  return limit;
}

void PotentialIntegrator::advance(double dt) {
  const TermSwitches sw = config_.switches();
  const double mu = mu_;
  const RhsFn N = [mu, sw](const Bundle& b) {
    return to_bundle(potential_rhs_spectral(to_u(b), mu, false, sw));
  };
  const Bundle u = advance_bundle(to_bundle(u_), dt, mu_, kPotentialViscous, N, config_.scheme);
  t_ += dt;
  if (!bundle_finite(u)) blow_up("non-finite state", t_);
  u_ = to_u(u);
  const double e = energy();
  if (initial_energy_ > 0.0 && e > kEnergyCeiling * initial_energy_) {
    blow_up("energy exceeded the ceiling", t_);
  }
}

void PotentialIntegrator::advance_to(double t_end) {
  while (t_ < t_end) {
    double dt = next_dt();
    if (t_ + dt * (1.0 + 1e-9) >= t_end) dt = t_end - t_;
    advance(dt);
    if (t_end - t_ < 1e-12 * std::max(1.0, std::abs(t_end))) t_ = t_end;
  }
}

PrimitiveIntegrator::PrimitiveIntegrator(const PrimitiveState& p, StepperConfig c)
    : u_(primitive_bundle(p)), t_(p.t), mu_(p.mu), config_(c) {
  validate_viscosity(mu_);
  config_.validate();
}

PrimitiveState PrimitiveIntegrator::state() const { return primitive_from_bundle(u_, t_, mu_); }

double PrimitiveIntegrator::next_dt() const {
  const double limit = dt_from_speed(u_[0].grid(), max_speed(u_[0], u_[1]), config_);
  if (config_.dt > 0.0) {
    check_dt(config_.dt, limit);
    return config_.dt;
  }
  return limit;
}

void PrimitiveIntegrator::advance(double dt) {
  const TermSwitches sw = config_.switches();
  const double mu = mu_;
  const RhsFn N = [mu, sw](const Bundle& b) { return primitive_rhs_spectral(b, mu, false, sw); };
  u_ = advance_bundle(u_, dt, mu_, kPrimitiveViscous, N, config_.scheme);
  t_ += dt;
  if (!bundle_finite(u_)) blow_up("non-finite state", t_);
}

void PrimitiveIntegrator::advance_to(double t_end) {
  while (t_ < t_end) {
    double dt = next_dt();
    if (t_ + dt * (1.0 + 1e-9) >= t_end) dt = t_end - t_;
    advance(dt);
    if (t_end - t_ < 1e-12 * std::max(1.0, std::abs(t_end))) t_ = t_end;
  }
}

}  // namespace ve2d
