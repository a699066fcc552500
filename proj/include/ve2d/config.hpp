#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ve2d/dynamics.hpp"
#include "ve2d/state.hpp"

namespace ve2d {

/// One run or a family of runs differing only in mu.
///
/// INI layout (keys are optional; defaults shown by the struct):
///   [grid]     n, L
///   [initial]  amplitude, profile (gaussian|ring|seed), support_radius, seed
///   [run]      mu (comma list), t_final, sample_interval, k_max, output_dir,
///              snapshots (true|false)
///   [stepper]  dt, cfl, scheme (if-rk4|imex), dealias
struct RunConfig {
  InitialDataParams initial;
  std::vector<double> mu{0.0};
  double t_final = 16.0;
  double sample_interval = 0.5;
  int k_max = 2;
  StepperConfig stepper;
  std::string output_dir = "ve2d_out";
  bool snapshots = true;

  const Grid grid() const { return Grid(initial.n, initial.box_len); }
  /// Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace ve2d
