#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ve2d/config.hpp"
#include "ve2d/diagnostics.hpp"

namespace ve2d {

/// Worker count for sweeps: VE2D_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
int worker_count();

/// Real field whose spectrum is supported on |m|_inf <= max_mode, with
/// coefficients drawn from seed in an order that does not depend on the grid.
/// The same (seed, max_mode, L) therefore gives the same function on every
/// grid with n / 2 > max_mode.
ScalarField random_band_limited(const Grid& g, std::uint64_t seed, int max_mode = 6,
                                double amplitude = 1.0);

/// Diagnostic sample times 0, dt, 2 dt, ... up to t_final, with t_final
/// appended when it is not a multiple of the interval.
std::vector<double> sample_times(double t_final, double interval);

struct RunResult {
  double mu = 0.0;
  std::filesystem::path dir;
  std::vector<DiagnosticsRecord> records;
  bool blew_up = false;
  double blowup_time = 0.0;
  std::string failure;

  /// Fits over [5 t_final / 16, t_final]; empty when the window is too short
  /// or a series touches zero.
  std::optional<DecayFit> good_fit;
  std::optional<DecayFit> gradient_fit;
  std::optional<DecayFit> calE_top_fit;

  double max_identity = 0.0;
  double max_constraint_linf = 0.0;
  /// max_t E_k(t) / E_k(0) for k = 0..k_max; 0 when E_k(0) = 0.
  std::vector<double> max_energy_ratio;
  std::optional<PotentialState> final_state;
};

/// Evolves cfg.initial with viscosity mu and writes into dir:
///   diagnostics.csv, summary.json, final.ve2d, energy.svg, decay.svg,
///   snapshots/t_XXXX.ve2d when cfg.snapshots is set,
///   FAILED (blow-up time and message) when the run blows up.
/// Rows are written as they are produced, so a failed run keeps its prefix.
RunResult run_simulation(const RunConfig& cfg, double mu, const std::filesystem::path& dir);
/// Single-mu form: requires exactly one mu and writes into cfg.output_dir.
RunResult run_simulation(const RunConfig& cfg);

struct SweepReport {
  std::vector<RunResult> runs;
  /// Max over mu of max_energy_ratio, per k.
  std::vector<double> max_over_mu;
  bool failed = false;
};

/// One run per mu from identical initial data, in a worker pool. Each run
/// goes to output_dir/mu_<value>; sweep.csv and sweep.svg sit in output_dir.
SweepReport sweep_viscosity(const RunConfig& cfg);

struct ConvergenceRow {
  double mu = 0.0;
  double l2_diff = 0.0;  ///< ||U_mu(T) - U_0(T)|| over V, H1, H2
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  ///< mu descending, the mu = 0 row last
  double order = 0.0;                ///< least-squares slope of log diff vs log mu
  bool strictly_decreasing = false;
};

/// Throws ConfigError unless the mu list holds 0 and at least three positive
/// values forming a geometric sequence. Throws BlowUpError when a run fails.
/// Writes convergence.csv into output_dir.
ConvergenceReport convergence_study(const RunConfig& cfg);

struct AuditReport {
  int random_samples = 0;
  IdentityReport random_pairs;     ///< max over random pairs
  IdentityReport random_families;  ///< max over families of random states
  double random_seconds = 0.0;

  double evolved_time = 0.0;
  double commutator_max = 0.0;
  IdentityReport evolved_identities;
  InequalityRatios evolved_ratios;
  InequalityRatios random_ratios;  ///< Sobolev ratios of a random compact bump

  /// max |residual(n) - residual(2n)| over the identities of one random pair.
  double resolution_shift = 0.0;

  static constexpr double kExactTolerance = 1e-12;
  static constexpr double kRegularizedTolerance = 1e-8;
  static constexpr double kCommutatorTolerance = 1e-6;
  bool identities_pass() const noexcept;
  bool commutator_pass() const noexcept { return commutator_max <= kCommutatorTolerance; }
};

/// Random-field identities, the evolved state at min(10, t_final) with the
/// first mu, and a resolution check at n and 2n. Writes audit.json into
/// output_dir.
AuditReport audit(const RunConfig& cfg, int random_samples = 100);

}  // namespace ve2d
