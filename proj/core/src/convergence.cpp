#include "mpsawave/convergence.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace mpsaw {

ConvergenceReport estimate_rates(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("rate estimation needs at least two rows");
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1].dx < rows[i].dx))
      throw std::invalid_argument("rows must be ordered by decreasing dx");
  for (const auto& r : rows)
    if (!(r.err_u > 0.0) || !(r.err_T > 0.0))
      throw std::invalid_argument("errors must be positive");

  ConvergenceReport rep;
  rep.rows = rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double h = std::log(rows[i].dx / rows[i + 1].dx);
    rep.rate_u.push_back(std::log(rows[i].err_u / rows[i + 1].err_u) / h);
    rep.rate_T.push_back(std::log(rows[i].err_T / rows[i + 1].err_T) / h);
  }
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "refinement,cells,dt,err_u,err_T,rate_u,rate_T\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    os << r.refinement << ',' << r.cells << ',' << r.dt << ',' << r.err_u << ',' << r.err_T << ',';
    if (i > 0)
      os << report.rate_u[i - 1] << ',' << report.rate_T[i - 1];
    else
      os << ',';
    os << '\n';
  }
}

void write_energy_csv(std::ostream& os, const std::vector<std::pair<double, double>>& series) {
  os << "t,E,E/E0\n";
  os << std::setprecision(12);
  const double e0 = series.empty() ? 1.0 : series.front().second;
  for (const auto& [t, e] : series) os << t << ',' << e << ',' << (e0 > 0.0 ? e / e0 : 0.0) << '\n';
}

}  // namespace mpsaw
