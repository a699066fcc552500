#include "ve2d/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "ve2d/dynamics.hpp"
#include "ve2d/error.hpp"
#include "ve2d/fft.hpp"
#include "ve2d/snapshot.hpp"
#include "ve2d/svg.hpp"
#include "ve2d/vector_fields.hpp"

namespace ve2d {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Runs f(i) for i in [0, count) on up to worker_count() threads. The first
/// exception is rethrown after every worker has stopped.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(worker_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::optional<DecayFit> try_fit(const std::vector<std::pair<double, double>>& series, double t0,
                                double t1) {
  try {
    return fit_decay(series, t0, t1);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

json fit_json(const std::optional<DecayFit>& f) {
  if (!f) return nullptr;
  return {{"exponent", f->exponent}, {"stderr", f->stderr_}, {"samples", f->samples}};
}

InitialDataParams params_for(const RunConfig& cfg, double mu) {
  InitialDataParams p = cfg.initial;
  p.mu = mu;
  return p;
}

void merge_max(IdentityReport& into, const IdentityReport& r) {
  into.radial_split = std::max(into.radial_split, r.radial_split);
  into.f2_split = std::max(into.f2_split, r.f2_split);
  into.polar_gradient = std::max(into.polar_gradient, r.polar_gradient);
  into.binomial_cancel = std::max(into.binomial_cancel, r.binomial_cancel);
  into.perp_cancel = std::max(into.perp_cancel, r.perp_cancel);
  into.riesz_trace = std::max(into.riesz_trace, r.riesz_trace);
  into.vector_split = std::max(into.vector_split, r.vector_split);
  into.perp_swap = std::max(into.perp_swap, r.perp_swap);
}

json identity_json(const IdentityReport& r) {
  return {{"radial_split", r.radial_split},     {"f2_split", r.f2_split},
          {"polar_gradient", r.polar_gradient}, {"binomial_cancel", r.binomial_cancel},
          {"perp_cancel", r.perp_cancel},       {"riesz_trace", r.riesz_trace},
          {"vector_split", r.vector_split},     {"perp_swap", r.perp_swap}};
}

json ratio_json(const InequalityRatios& r) {
  return {{"sobolev_r", r.sobolev_r},         {"sobolev_weighted", r.sobolev_weighted},
          {"sobolev_interior", r.sobolev_interior}, {"f2_bound", r.f2_bound},
          {"f3_bound", r.f3_bound},           {"div_f2_bound", r.div_f2_bound},
          {"fij_bound", r.fij_bound}};
}

void write_plots(const RunResult& r, const fs::path& dir) {
  std::vector<PlotSeries> energy;
  const std::size_t kE = r.records.empty() ? 0 : r.records.front().energy.E.size();
  for (std::size_t k = 0; k < kE; ++k) {
    PlotSeries s{"E" + std::to_string(k), {}};
    for (const DiagnosticsRecord& rec : r.records) s.points.emplace_back(rec.t, rec.energy.E[k]);
    energy.push_back(std::move(s));
  }
  for (std::size_t k = 1; k < kE + 1; ++k) {
    PlotSeries s{"calE" + std::to_string(k), {}};
    for (const DiagnosticsRecord& rec : r.records) s.points.emplace_back(rec.t, rec.energy.calE[k]);
    energy.push_back(std::move(s));
  }
  PlotOptions eo;
  eo.title = "energies, mu = " + format_g(r.mu);
  eo.y_label = "energy";
  eo.log_y = true;
  write_text_file((dir / "energy.svg").string(), line_plot_svg(energy, eo));

  PlotSeries good{"good_sup", {}};
  PlotSeries grad{"sup |grad U|", {}};
  for (const DiagnosticsRecord& rec : r.records) {
    good.points.emplace_back(rec.t, rec.good_sup);
    grad.points.emplace_back(rec.t, rec.gradient_sup);
  }
  PlotOptions d;
  d.title = "decay, mu = " + format_g(r.mu);
  d.y_label = "sup norm";
  d.log_x = true;
  d.log_y = true;
  write_text_file((dir / "decay.svg").string(), line_plot_svg({good, grad}, d));
}

double slope(const std::vector<std::pair<double, double>>& xy) {
  const double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxy / sxx;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("VE2D_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ScalarField random_band_limited(const Grid& g, std::uint64_t seed, int max_mode, double amplitude) {
  if (max_mode < 1 || max_mode >= g.n() / 2) {
    throw InvalidArgument("random_band_limited: max_mode must lie in [1, n/2)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Spectrum s(g);
  const int n = g.n();
  auto p_of = [n](int m) { return m < 0 ? m + n : m; };
  for (int m1 = -max_mode; m1 <= max_mode; ++m1) {
    for (int m2 = 0; m2 <= max_mode; ++m2) {
      if (m2 == 0 && m1 <= 0) continue;
      const double decay = 1.0 / (1.0 + 0.1 * (m1 * m1 + m2 * m2));
      const double re = normal(rng);
      const double im = normal(rng);
      const Complex c = 0.5 * amplitude * decay * Complex(re, im);
      s(p_of(m1), m2) = c;
      if (m2 == 0) s(p_of(-m1), 0) = std::conj(c);
    }
  }
  return to_physical(s);
}

std::vector<double> sample_times(double t_final, double interval) {
  if (!(interval > 0.0) || !(t_final >= 0.0)) {
    throw InvalidArgument("sample_times: need interval > 0 and t_final >= 0");
  }
  std::vector<double> out;
  const long count = static_cast<long>(std::floor(t_final / interval + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(static_cast<double>(k) * interval);
  if (t_final - out.back() > 1e-9 * std::max(1.0, t_final)) out.push_back(t_final);
  return out;
}

RunResult run_simulation(const RunConfig& cfg, double mu, const fs::path& dir) {
  cfg.validate();
  validate_viscosity(mu);
  fs::create_directories(dir);
  fs::remove(dir / "FAILED");
  if (cfg.snapshots) fs::create_directories(dir / "snapshots");

  RunResult res;
  res.mu = mu;
  res.dir = dir;
  const InitialData init = make_initial_data(params_for(cfg, mu));
  StepperConfig sc = cfg.stepper;
  const TermSwitches sw = sc.switches();

  std::ofstream csv(dir / "diagnostics.csv", std::ios::binary | std::ios::trunc);
  if (!csv) throw Error("cannot write " + (dir / "diagnostics.csv").string());
  csv << csv_header() << '\n';

  PotentialIntegrator it(init.state, sc);
  const std::vector<double> times = sample_times(cfg.t_final, cfg.sample_interval);
  std::size_t sample = 0;
  try {
    for (double ts : times) {
      it.advance_to(ts);
      const PotentialState s = it.state();
      const DerivedFamily fam = derived_family(s, cfg.k_max, sw);
      DiagnosticsRecord rec = diagnose(fam, s.H);
      csv << csv_row(rec) << '\n';
      csv.flush();
      if (cfg.snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "t_%04zu.ve2d", sample);
        write_snapshot(dir / "snapshots" / name, s);
      }
      res.records.push_back(std::move(rec));
      ++sample;
    }
  } catch (const BlowUpError& e) {
    res.blew_up = true;
    res.blowup_time = e.time();
    res.failure = e.what();
  }
  csv.close();

  const PotentialState last = it.state();
  write_snapshot(dir / "final.ve2d", last);
  res.final_state = last;

  const std::size_t kE = res.records.empty() ? 0 : res.records.front().energy.E.size();
  res.max_energy_ratio.assign(kE, 0.0);
  std::vector<std::pair<double, double>> good, grad, cal;
  for (const DiagnosticsRecord& rec : res.records) {
    for (std::size_t k = 0; k < kE; ++k) {
      const double e0 = res.records.front().energy.E[k];
      if (e0 > 0.0) res.max_energy_ratio[k] = std::max(res.max_energy_ratio[k], rec.energy.E[k] / e0);
    }
    res.max_identity = std::max({res.max_identity, rec.identities.radial_split,
                                 rec.identities.f2_split, rec.identities.polar_gradient});
    res.max_constraint_linf = std::max(res.max_constraint_linf, rec.constraint_linf);
    good.emplace_back(rec.t, rec.good_sup);
    grad.emplace_back(rec.t, rec.gradient_sup);
    cal.emplace_back(rec.t, rec.energy.calE.back());
  }
  const double t0 = 5.0 * cfg.t_final / 16.0;
  res.good_fit = try_fit(good, t0, cfg.t_final);
  res.gradient_fit = try_fit(grad, t0, cfg.t_final);
  res.calE_top_fit = try_fit(cal, t0, cfg.t_final);

  json summary = {
      {"status", res.blew_up ? "blow-up" : "ok"},
      {"n", cfg.initial.n},
      {"L", cfg.initial.box_len},
      {"amplitude", cfg.initial.amplitude},
      {"mu", mu},
      {"t_final", cfg.t_final},
      {"t_reached", it.time()},
      {"k_max", cfg.k_max},
      {"samples", res.records.size()},
      {"fit_window", {t0, cfg.t_final}},
      {"good_sup_fit", fit_json(res.good_fit)},
      {"gradient_sup_fit", fit_json(res.gradient_fit)},
      {"calE_top_fit", fit_json(res.calE_top_fit)},
      {"max_identity_residual", res.max_identity},
      {"max_constraint_linf", res.max_constraint_linf},
      {"max_energy_ratio", res.max_energy_ratio},
  };
  if (res.blew_up) {
    summary["blowup_time"] = res.blowup_time;
    write_text_file((dir / "FAILED").string(),
                    "blow-up at t = " + format_g(res.blowup_time) + "\n" + res.failure + "\n");
  }
  write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  write_plots(res, dir);
  return res;
}

RunResult run_simulation(const RunConfig& cfg) {
  if (cfg.mu.size() != 1) throw ConfigError("simulate takes exactly one mu; use sweep-mu for a list");
  return run_simulation(cfg, cfg.mu.front(), cfg.output_dir);
}

SweepReport sweep_viscosity(const RunConfig& cfg) {
  cfg.validate();
  const fs::path root(cfg.output_dir);
  fs::create_directories(root);
  SweepReport rep;
  std::vector<std::optional<RunResult>> slots(cfg.mu.size());
  parallel_for(cfg.mu.size(), [&](std::size_t i) {
    const double mu = cfg.mu[i];
    slots[i] = run_simulation(cfg, mu, root / ("mu_" + format_g(mu)));
  });
  for (auto& s : slots) rep.runs.push_back(std::move(*s));

  std::ofstream csv(root / "sweep.csv", std::ios::binary | std::ios::trunc);
  csv << "mu,status";
  const std::size_t kE = static_cast<std::size_t>(cfg.k_max) + 1;
  for (std::size_t k = 0; k < kE; ++k) csv << ",max_ratio_E" << k;
  csv << ",calE_top_exponent\n";
  rep.max_over_mu.assign(kE, 0.0);
  std::vector<PlotSeries> e1;
  for (const RunResult& r : rep.runs) {
    rep.failed = rep.failed || r.blew_up;
    csv << format_g(r.mu) << ',' << (r.blew_up ? "blow-up" : "ok");
    for (std::size_t k = 0; k < kE; ++k) {
      const double v = k < r.max_energy_ratio.size() ? r.max_energy_ratio[k] : 0.0;
      rep.max_over_mu[k] = std::max(rep.max_over_mu[k], v);
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      csv << buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.17g", r.calE_top_fit ? r.calE_top_fit->exponent : NAN);
    csv << buf << '\n';

    PlotSeries s{"mu = " + format_g(r.mu), {}};
    for (const DiagnosticsRecord& rec : r.records) {
      const double e0 = r.records.front().energy.E[1];
      s.points.emplace_back(rec.t, e0 > 0.0 ? rec.energy.E[1] / e0 : NAN);
    }
    e1.push_back(std::move(s));
  }
  PlotOptions o;
  o.title = "E1(t) / E1(0)";
  o.y_label = "ratio";
  write_text_file((root / "sweep.svg").string(), line_plot_svg(e1, o));
  return rep;
}

ConvergenceReport convergence_study(const RunConfig& cfg) {
  cfg.validate();
  std::vector<double> pos;
  bool has_zero = false;
  for (double m : cfg.mu) {
    if (m == 0.0) has_zero = true;
    else pos.push_back(m);
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  if (!has_zero || pos.size() < 3) {
    throw ConfigError("convergence study needs mu = 0 and at least three positive values");
  }
  const double q = pos[1] / pos[0];
  for (std::size_t i = 1; i < pos.size(); ++i) {
    if (pos[i] == pos[i - 1] || std::abs(pos[i] / pos[i - 1] - q) > 1e-9 * q) {
      throw ConfigError("positive mu values must form a geometric sequence");
    }
  }

  std::vector<double> mus = pos;
  mus.push_back(0.0);
  std::vector<std::optional<PotentialState>> finals(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) {
    PotentialIntegrator it(make_initial_data(params_for(cfg, mus[i])).state, cfg.stepper);
    it.advance_to(cfg.t_final);
    finals[i] = it.state();
  });

  ConvergenceReport rep;
  const PotentialState& ref = *finals.back();
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const PotentialState& s = *finals[i];
    const double d = std::sqrt(l2_norm_sq(s.V - ref.V) + l2_norm_sq(s.H[0] - ref.H[0]) +
                               l2_norm_sq(s.H[1] - ref.H[1]));
    rep.rows.push_back({mus[i], d});
    if (mus[i] > 0.0 && d > 0.0) logs.emplace_back(std::log(mus[i]), std::log(d));
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < pos.size(); ++i) {
    rep.strictly_decreasing = rep.strictly_decreasing && rep.rows[i].l2_diff < rep.rows[i - 1].l2_diff;
  }
  rep.order = logs.size() >= 2 ? slope(logs) : NAN;

  const fs::path root(cfg.output_dir);
  fs::create_directories(root);
  std::ofstream csv(root / "convergence.csv", std::ios::binary | std::ios::trunc);
  csv << "mu,l2_diff\n";
  for (const ConvergenceRow& r : rep.rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.mu, r.l2_diff);
    csv << buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "# order %.6g\n", rep.order);
  csv << buf;
  return rep;
}

bool AuditReport::identities_pass() const noexcept {
  for (const IdentityReport* r : {&random_pairs, &random_families}) {
    if (r->max_exact() > kExactTolerance || r->polar_gradient > kRegularizedTolerance) return false;
  }
  return resolution_shift <= kExactTolerance;
}

AuditReport audit(const RunConfig& cfg, int random_samples) {
  cfg.validate();
  AuditReport rep;
  const Grid g = cfg.grid();
  const double L = g.box_len();

  const auto t_start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.initial.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < random_samples; ++i) {
    const std::uint64_t base = rng();
    auto field = [&](std::uint64_t k) { return random_band_limited(g, base + k, 6); };
    const FamilyEntry a{field(0), VectorField2(field(1), field(2))};
    const FamilyEntry b{field(3), VectorField2(field(4), field(5))};
    const GeometryWeights w(g, unit(rng) * L / 4.0);
    merge_max(rep.random_pairs, identity_checks(a, b, w));
  }
  rep.random_samples = random_samples;
  for (int i = 0; i < 2; ++i) {
    const std::uint64_t base = rng();
    PotentialState s{random_band_limited(g, base, 4, 1e-2),
                     VectorField2(random_band_limited(g, base + 1, 4, 1e-2),
                                  random_band_limited(g, base + 2, 4, 1e-2)),
                     unit(rng) * L / 4.0, cfg.mu.front()};
    const DerivedFamily fam = derived_family(s, cfg.k_max, cfg.stepper.switches());
    merge_max(rep.random_families, identity_checks(fam, GeometryWeights(g, s.t)));
  }
  rep.random_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  {
    const ScalarField bump = ScalarField::from_function(g, [](double x1, double x2) {
      return std::exp(-(x1 * x1 + x2 * x2) / 4.0);
    });
    rep.random_ratios = sobolev_ratios(bump, GeometryWeights(g, 0.0));
  }

  {
    const std::uint64_t base = rng();
    const double t = unit(rng) * L / 4.0;
    auto pair_on = [&](const Grid& gg) {
      auto field = [&](std::uint64_t k) { return random_band_limited(gg, base + k, 6); };
      const FamilyEntry a{field(0), VectorField2(field(1), field(2))};
      const FamilyEntry b{field(3), VectorField2(field(4), field(5))};
      return identity_checks(a, b, GeometryWeights(gg, t));
    };
    const IdentityReport coarse = pair_on(g);
    const IdentityReport fine = pair_on(Grid(2 * g.n(), L));
    const double d[] = {coarse.radial_split - fine.radial_split,
                        coarse.f2_split - fine.f2_split,
                        coarse.binomial_cancel - fine.binomial_cancel,
                        coarse.perp_cancel - fine.perp_cancel,
                        coarse.riesz_trace - fine.riesz_trace,
                        coarse.vector_split - fine.vector_split,
                        coarse.perp_swap - fine.perp_swap};
    for (double v : d) rep.resolution_shift = std::max(rep.resolution_shift, std::abs(v));
  }

  rep.evolved_time = std::min(10.0, cfg.t_final);
  PotentialIntegrator it(make_initial_data(params_for(cfg, cfg.mu.front())).state, cfg.stepper);
  it.advance_to(rep.evolved_time);
  const PotentialState s = it.state();
  const DerivedFamily fam = derived_family(s, cfg.k_max, cfg.stepper.switches());
  for (const CommutatorResidual& r : commutator_residuals(fam)) {
    rep.commutator_max = std::max(rep.commutator_max, r.max());
  }
  const GeometryWeights w(g, s.t);
  rep.evolved_identities = identity_checks(fam, w);
  rep.evolved_ratios = inequality_ratios(fam, w);

  const json out = {
      {"random_samples", rep.random_samples},
      {"random_pairs", identity_json(rep.random_pairs)},
      {"random_families", identity_json(rep.random_families)},
      {"gaussian_sobolev_ratios", ratio_json(rep.random_ratios)},
      {"resolution_shift", rep.resolution_shift},
      {"evolved_time", rep.evolved_time},
      {"commutator_max", rep.commutator_max},
      {"evolved_identities", identity_json(rep.evolved_identities)},
      {"evolved_ratios", ratio_json(rep.evolved_ratios)},
      {"identities_pass", rep.identities_pass()},
      {"commutator_pass", rep.commutator_pass()},
  };
  const fs::path root(cfg.output_dir);
  fs::create_directories(root);
  write_text_file((root / "audit.json").string(), out.dump(2) + "\n");
  return rep;
}

}  // namespace ve2d
