#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ve2d/config.hpp"
#include "ve2d/diagnostics.hpp"
#include "ve2d/error.hpp"
#include "ve2d/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitConfig = 3;

void print_fit(const char* name, const std::optional<ve2d::DecayFit>& f) {
  if (f) {
    std::printf("  %-18s %+.4f +- %.4f (%zu samples)\n", name, f->exponent, f->stderr_, f->samples);
  } else {
    std::printf("  %-18s n/a\n", name);
  }
}

void print_run(const ve2d::RunResult& r) {
  std::printf("mu = %g: %s, %zu samples -> %s\n", r.mu, r.blew_up ? "BLOW-UP" : "ok",
              r.records.size(), r.dir.string().c_str());
  if (r.blew_up) std::printf("  blow-up at t = %g: %s\n", r.blowup_time, r.failure.c_str());
  print_fit("good_sup", r.good_fit);
  print_fit("sup|grad U|", r.gradient_fit);
  print_fit("calE top", r.calE_top_fit);
  std::printf("  max identity residual %.3e, max constraint %.3e\n", r.max_identity,
              r.max_constraint_linf);
}

int cmd_simulate(const std::string& path) {
  const ve2d::RunResult r = ve2d::run_simulation(ve2d::load_config(path));
  print_run(r);
  return r.blew_up ? kExitBlowUp : kExitOk;
}

int cmd_sweep(const std::string& path) {
  const ve2d::SweepReport rep = ve2d::sweep_viscosity(ve2d::load_config(path));
  for (const ve2d::RunResult& r : rep.runs) {
    std::printf("mu = %-8g %-8s", r.mu, r.blew_up ? "BLOW-UP" : "ok");
    for (std::size_t k = 0; k < r.max_energy_ratio.size(); ++k) {
      std::printf("  max E%zu/E%zu(0) = %.6f", k, k, r.max_energy_ratio[k]);
    }
    std::printf("\n");
  }
  std::printf("max over mu:");
  for (std::size_t k = 0; k < rep.max_over_mu.size(); ++k) std::printf("  E%zu %.6f", k, rep.max_over_mu[k]);
  std::printf("\n");
  return rep.failed ? kExitBlowUp : kExitOk;
}

int cmd_converge(const std::string& path) {
  const ve2d::ConvergenceReport rep = ve2d::convergence_study(ve2d::load_config(path));
  std::printf("%-10s %s\n", "mu", "||U_mu(T) - U_0(T)||");
  for (const ve2d::ConvergenceRow& r : rep.rows) std::printf("%-10g %.6e\n", r.mu, r.l2_diff);
  std::printf("fitted order in mu: %.4f\nstrictly decreasing: %s\n", rep.order,
              rep.strictly_decreasing ? "yes" : "no");
  return kExitOk;
}

int cmd_audit(const std::string& path) {
  const ve2d::AuditReport rep = ve2d::audit(ve2d::load_config(path));
  auto line = [](const char* name, double v, double tol) {
    std::printf("  %-22s %.3e  %s\n", name, v, v <= tol ? "pass" : "FAIL");
  };
  const double ex = ve2d::AuditReport::kExactTolerance;
  std::printf("random fields (%d pairs, %.2f s):\n", rep.random_samples, rep.random_seconds);
  const ve2d::IdentityReport& p = rep.random_pairs;
  const ve2d::IdentityReport& f = rep.random_families;
  line("radial_split", p.radial_split, ex);
  line("f2_split", p.f2_split, ex);
  line("vector_split", p.vector_split, ex);
  line("perp_swap", p.perp_swap, ex);
  line("perp_cancel", p.perp_cancel, ex);
  line("riesz_trace", p.riesz_trace, ex);
  line("polar_gradient", p.polar_gradient, ve2d::AuditReport::kRegularizedTolerance);
  line("binomial_cancel", f.binomial_cancel, ex);
  line("resolution shift", rep.resolution_shift, ex);
  std::printf("evolved state at t = %g:\n", rep.evolved_time);
  line("commutator residual", rep.commutator_max, ve2d::AuditReport::kCommutatorTolerance);
  std::printf("  identities (max exact) %.3e\n", rep.evolved_identities.max_exact());
  const ve2d::InequalityRatios& r = rep.evolved_ratios;
  std::printf("measured constants:\n");
  std::printf("  sobolev r %.4f  weighted %.4f  interior %.4f\n", r.sobolev_r, r.sobolev_weighted,
              r.sobolev_interior);
  std::printf("  f2 %.4f  f3 %.4f  div f2 %.4e  fij %.4f\n", r.f2_bound, r.f3_bound,
              r.div_f2_bound, r.fij_bound);
  std::printf("  gaussian bump sobolev max %.4f\n", rep.random_ratios.sobolev_max());
  return rep.identities_pass() && rep.commutator_pass() ? kExitOk : kExitFailure;
}

int cmd_fit(const std::string& csv, const std::string& column, double t0, double t1) {
  std::ifstream in(csv);
  if (!in) throw ve2d::ConfigError("cannot open " + csv);
  std::string line;
  if (!std::getline(in, line)) throw ve2d::ConfigError(csv + " is empty");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  std::size_t t_col = header.size();
  std::size_t v_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") t_col = i;
    if (header[i] == column) v_col = i;
  }
  if (t_col == header.size()) throw ve2d::ConfigError(csv + " has no t column");
  if (v_col == header.size()) throw ve2d::ConfigError(csv + " has no column " + column);
  std::vector<std::pair<double, double>> series;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> cells;
    std::istringstream rs(line);
    std::string cell;
    while (std::getline(rs, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != header.size()) throw ve2d::ConfigError("ragged row in " + csv);
    series.emplace_back(cells[t_col], cells[v_col]);
  }
  const ve2d::DecayFit f = ve2d::fit_decay(series, t0, t1);
  std::printf("%s ~ t^(%.6f +- %.6f) over [%g, %g], %zu samples\n", column.c_str(), f.exponent,
              f.stderr_, t0, t1, f.samples);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ve2d: viscoelastic potential-form solver and vector-field diagnostics"};
  app.require_subcommand(1);

  std::string config;
  auto* sim = app.add_subcommand("simulate", "single run with diagnostics");
  sim->add_option("--config", config, "INI config file")->required();
  auto* sweep = app.add_subcommand("sweep-mu", "one run per mu in the config");
  sweep->add_option("--config", config, "INI config file")->required();
  auto* conv = app.add_subcommand("converge", "vanishing-viscosity convergence table");
  conv->add_option("--config", config, "INI config file")->required();
  auto* aud = app.add_subcommand("audit", "identity and inequality audit");
  aud->add_option("--config", config, "INI config file")->required();

  std::string csv, column;
  double t0 = 0.0, t1 = 0.0;
  auto* fit = app.add_subcommand("fit", "power-law fit of one CSV column");
  fit->add_option("--csv", csv, "diagnostics CSV")->required();
  fit->add_option("--column", column, "column name")->required();
  fit->add_option("--t0", t0, "window start")->required();
  fit->add_option("--t1", t1, "window end")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(config);
    if (*sweep) return cmd_sweep(config);
    if (*conv) return cmd_converge(config);
    if (*aud) return cmd_audit(config);
    if (*fit) return cmd_fit(csv, column, t0, t1);
  } catch (const ve2d::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ve2d::BlowUpError& e) {
    std::cerr << "blow-up at t = " << e.time() << ": " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
