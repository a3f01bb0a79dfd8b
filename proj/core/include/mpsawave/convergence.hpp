#pragma once

#include "mpsawave/types.hpp"

#include <iosfwd>
#include <vector>

namespace mpsaw {

struct ConvergenceRow {
  int refinement = 0;
  long cells = 0;
  double dx = 0.0;
  double dt = 0.0;
  double err_u = 0.0;
  double err_T = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<double> rate_u;  ///< between consecutive rows, size rows-1
  std::vector<double> rate_T;
};

/// Consecutive-pair rates: log(e_i / e_{i+1}) / log(dx_i / dx_{i+1}).
ConvergenceReport estimate_rates(const std::vector<ConvergenceRow>& rows);

/// CSV columns: refinement, cells, dt, err_u, err_T, rate_u, rate_T.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

/// CSV columns: t, E, E/E0.
void write_energy_csv(std::ostream& os, const std::vector<std::pair<double, double>>& series);

}  // namespace mpsaw
